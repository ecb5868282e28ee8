//! Reduced density matrix of the dephasing qubit and its exact eigensystem.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Initial pure state `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochInitial {
    theta: f64,
}

impl BlochInitial {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::Domain {
                name: "theta",
                value: theta,
                rule: "polar angle must lie in [0, π]",
            });
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// 2×2 density matrix at time `Ωt`, indexed `entries[row][col]` in the
/// `{|0⟩, |1⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensity {
    pub entries: [[Complex64; 2]; 2],
    pub time: f64,
    /// Set when the coherence exceeds the pure-state bound, which happens
    /// when `e^{−F} > 1`. The matrix is returned unchanged.
    pub positivity_warning: bool,
}

impl ReducedDensity {
    pub fn from_entries(entries: [[Complex64; 2]; 2], time: f64) -> Self {
        let det = entries[0][0].re * entries[1][1].re - entries[0][1].norm_sqr();
        Self {
            entries,
            time,
            positivity_warning: det < -1e-12,
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let e = &self.entries;
        (e[0][1] - e[1][0].conj())
            .norm()
            .max(e[0][0].im.abs())
            .max(e[1][1].im.abs())
    }

    pub fn max_abs_diff(&self, other: &ReducedDensity) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        m
    }

    pub fn apply(&self, v: &[Complex64; 2]) -> [Complex64; 2] {
        let e = &self.entries;
        [
            e[0][0] * v[0] + e[0][1] * v[1],
            e[1][0] * v[0] + e[1][1] * v[1],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub eigenvalue: f64,
    pub eigenvector: [Complex64; 2],
}

/// `⟨a|b⟩`.
pub fn inner(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Pure dephasing: populations `cos²(θ/2)`, `sin²(θ/2)` and coherence
/// `⟨0|ρ|1⟩ = cos(θ/2) sin(θ/2) e^{−F} e^{+iΩt}`, so that
/// `⟨1|ρ|0⟩ = ρ₁₀(0) e^{−F} e^{−iΩt}`. Time is in units of 1/Ω.
pub fn reduced_density(init: &BlochInitial, decoherence: f64, t: f64) -> Result<ReducedDensity> {
    if decoherence.is_nan() {
        return Err(Error::Domain {
            name: "F",
            value: decoherence,
            rule: "decoherence factor must not be NaN",
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain {
            name: "t",
            value: t,
            rule: "time must be finite and non-negative",
        });
    }
    let (s, c) = (0.5 * init.theta).sin_cos();
    let attenuation = (-decoherence).exp();
    let coherence = c * s * attenuation;
    let upper = Complex64::from_polar(coherence, t);
    Ok(ReducedDensity {
        entries: [
            [Complex64::new(c * c, 0.0), upper],
            [upper.conj(), Complex64::new(s * s, 0.0)],
        ],
        time: t,
        positivity_warning: c * s > 0.0 && attenuation > 1.0 + 1e-12,
    })
}

const DEGENERACY_GAP: f64 = 1e-12;

/// Closed-form eigensystem, ordered by descending eigenvalue. Each
/// eigenvector is normalised with its first non-zero component real and
/// positive.
pub fn eigensystem(rho: &ReducedDensity) -> Result<(EigenPair, EigenPair)> {
    let a = rho.entries[0][0].re;
    let d = rho.entries[1][1].re;
    let b = rho.entries[0][1];
    let mean = 0.5 * (a + d);
    let h = 0.5 * (a - d);
    let r = h.hypot(b.norm());
    if 2.0 * r < DEGENERACY_GAP {
        return Err(Error::Degenerate {
            gap: 2.0 * r,
            t: rho.time,
        });
    }
    let upper = EigenPair {
        eigenvalue: mean + r,
        eigenvector: eigenvector(h, b, r),
    };
    let lower = EigenPair {
        eigenvalue: mean - r,
        eigenvector: eigenvector(h, b, -r),
    };
    Ok((upper, lower))
}

// Null vector of [[h − μ, b], [b*, −h − μ]] for μ = ±r, taken from whichever
// row gives the better-conditioned candidate.
fn eigenvector(h: f64, b: Complex64, mu: f64) -> [Complex64; 2] {
    let from_first = [b, Complex64::new(mu - h, 0.0)];
    let from_second = [Complex64::new(mu + h, 0.0), b.conj()];
    let n1 = (from_first[0].norm_sqr() + from_first[1].norm_sqr()).sqrt();
    let n2 = (from_second[0].norm_sqr() + from_second[1].norm_sqr()).sqrt();
    let (v, n) = if n1 >= n2 {
        (from_first, n1)
    } else {
        (from_second, n2)
    };
    fix_gauge([v[0] / n, v[1] / n])
}

fn fix_gauge(v: [Complex64; 2]) -> [Complex64; 2] {
    let pivot = if v[0].norm() > 1e-14 { v[0] } else { v[1] };
    let phase = pivot.conj() / pivot.norm();
    [v[0] * phase, v[1] * phase]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn north_pole_is_pure() {
        let rho = reduced_density(&BlochInitial::new(0.0).unwrap(), 3.0, 1.7).unwrap();
        assert_eq!(rho.entries[0][0], c(1.0, 0.0));
        assert_eq!(rho.entries[1][1], c(0.0, 0.0));
        assert_eq!(rho.entries[0][1], c(0.0, 0.0));
    }

    #[test]
    fn equator_values() {
        let init = BlochInitial::new(PI / 2.0).unwrap();
        let rho = reduced_density(&init, 0.0, 0.0).unwrap();
        for row in rho.entries {
            for e in row {
                assert_abs_diff_eq!(e.re, 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(e.im, 0.0, epsilon = 1e-15);
            }
        }
        let mixed = reduced_density(&init, 800.0, 2.0).unwrap();
        assert_abs_diff_eq!(mixed.entries[0][1].norm(), 0.0, epsilon = 1e-300);
        assert_abs_diff_eq!(mixed.entries[0][0].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn phase_orientation() {
        let init = BlochInitial::new(PI / 2.0).unwrap();
        let rho = reduced_density(&init, 0.0, 0.25).unwrap();
        assert!(rho.entries[1][0].im < 0.0);
        assert!(rho.entries[0][1].im > 0.0);
    }

    #[test]
    fn positivity_flag() {
        let init = BlochInitial::new(PI / 3.0).unwrap();
        assert!(
            reduced_density(&init, -0.1, 1.0)
                .unwrap()
                .positivity_warning
        );
        assert!(!reduced_density(&init, 0.1, 1.0).unwrap().positivity_warning);
        let pole = BlochInitial::new(0.0).unwrap();
        assert!(
            !reduced_density(&pole, -0.1, 1.0)
                .unwrap()
                .positivity_warning
        );
    }

    #[test]
    fn basis_states() {
        let rho = ReducedDensity::from_entries(
            [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]],
            0.0,
        );
        let (p, m) = eigensystem(&rho).unwrap();
        assert_eq!(p.eigenvalue, 1.0);
        assert_eq!(m.eigenvalue, 0.0);
        assert_eq!(p.eigenvector, [c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(m.eigenvector, [c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn superposition() {
        let h = c(0.5, 0.0);
        let rho = ReducedDensity::from_entries([[h, h], [h, h]], 0.0);
        let (p, m) = eigensystem(&rho).unwrap();
        assert_abs_diff_eq!(p.eigenvalue, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.eigenvalue, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_eigenvalues() {
        let theta = PI / 3.0;
        let f: f64 = 0.2;
        let rho = reduced_density(&BlochInitial::new(theta).unwrap(), f, 0.9).unwrap();
        let (p, m) = eigensystem(&rho).unwrap();
        let root = (theta.cos().powi(2) + (-2.0 * f).exp() * theta.sin().powi(2)).sqrt();
        assert_abs_diff_eq!(p.eigenvalue, 0.5 * (1.0 + root), epsilon = 1e-15);
        assert_abs_diff_eq!(m.eigenvalue, 0.5 * (1.0 - root), epsilon = 1e-15);
        // characteristic polynomial λ² − λ + det ρ
        for e in [p.eigenvalue, m.eigenvalue] {
            assert_abs_diff_eq!(e * e - e + rho.determinant().re, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let rho = reduced_density(&BlochInitial::new(PI / 2.0).unwrap(), 1e3, 4.0).unwrap();
        assert!(matches!(eigensystem(&rho), Err(Error::Degenerate { t, .. }) if t == 4.0));
    }

    #[test]
    fn gauge_and_residuals() {
        let rho = reduced_density(&BlochInitial::new(2.0).unwrap(), 0.4, 2.2).unwrap();
        let (p, m) = eigensystem(&rho).unwrap();
        for pair in [p, m] {
            let v = pair.eigenvector;
            assert!(v[0].im == 0.0 && v[0].re > 0.0);
            let rv = rho.apply(&v);
            for k in 0..2 {
                assert!((rv[k] - v[k] * pair.eigenvalue).norm() < 1e-15);
            }
        }
        assert!(inner(&p.eigenvector, &m.eigenvector).norm() < 1e-15);
    }

    #[test]
    fn theta_domain() {
        assert!(BlochInitial::new(-0.1).is_err());
        assert!(BlochInitial::new(3.2).is_err());
        assert!(BlochInitial::new(PI).is_ok());
    }
}
