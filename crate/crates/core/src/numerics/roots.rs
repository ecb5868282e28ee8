use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Intervals on which a sampled function is negative.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SignChangeReport {
    /// Disjoint, ordered `(t_lo, t_hi)` pairs.
    pub intervals: Vec<(f64, f64)>,
    /// Start of the first negative interval, if any.
    pub first_crossing: Option<f64>,
}

impl SignChangeReport {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Locate the sub-intervals of `window` where `f < 0`.
///
/// `f` is sampled on `samples` uniformly spaced points; every transition
/// between negative and non-negative samples is refined by bisection until
/// `|f| < 1e-10` or the bracket is narrower than `1e-10·(t1 − t0)`.
/// Endpoints of the window are reported as-is when `f` is already negative
/// there.
pub fn find_sign_changes<F: Fn(f64) -> f64>(
    f: F,
    window: (f64, f64),
    samples: usize,
) -> Result<SignChangeReport> {
    let (t0, t1) = window;
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::Invalid(format!(
            "sign-change window must satisfy t0 < t1, got ({t0}, {t1})"
        )));
    }
    if samples < 16 {
        return Err(Error::Domain {
            name: "samples",
            value: samples as f64,
            rule: "at least 16 samples are required",
        });
    }

    let span = t1 - t0;
    let ts: Vec<f64> = (0..samples)
        .map(|i| {
            if i + 1 == samples {
                t1
            } else {
                t0 + span * i as f64 / (samples - 1) as f64
            }
        })
        .collect();
    let mut negative = Vec::with_capacity(samples);
    for &t in &ts {
        let v = f(t);
        if v.is_nan() {
            return Err(Error::NonFinite { at: t });
        }
        negative.push(v < 0.0);
    }

    let width_tol = 1e-10 * span;
    let refine = |mut a: f64, mut b: f64| -> f64 {
        let neg_a = f(a) < 0.0;
        while b - a > width_tol {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm.abs() < 1e-10 {
                return m;
            }
            if (fm < 0.0) == neg_a {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };

    let mut intervals = Vec::new();
    let mut i = 0;
    while i < samples {
        if !negative[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < samples && negative[i + 1] {
            i += 1;
        }
        let end = i;
        let lo = if start == 0 {
            t0
        } else {
            refine(ts[start - 1], ts[start])
        };
        let hi = if end + 1 == samples {
            t1
        } else {
            refine(ts[end], ts[end + 1])
        };
        if hi > lo {
            intervals.push((lo, hi));
        }
        i += 1;
    }

    let first_crossing = intervals.first().map(|iv| iv.0);
    Ok(SignChangeReport {
        intervals,
        first_crossing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn constant_has_no_intervals() {
        let r = find_sign_changes(|_| 1.0, (0.0, 10.0), 64).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.first_crossing, None);
    }

    #[test]
    fn sine_negative_on_second_half() {
        let r = find_sign_changes(f64::sin, (0.0, 2.0 * PI), 100).unwrap();
        assert_eq!(r.intervals.len(), 1);
        let (lo, hi) = r.intervals[0];
        assert_abs_diff_eq!(lo, PI, epsilon = 1e-9);
        assert_abs_diff_eq!(hi, 2.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn complement_of_negated_function() {
        let f = |t: f64| (3.0 * t).cos() + 0.3;
        let neg = find_sign_changes(f, (0.0, 6.0), 200).unwrap();
        let pos = find_sign_changes(|t| -f(t), (0.0, 6.0), 200).unwrap();
        let mut edges: Vec<f64> = neg
            .intervals
            .iter()
            .chain(pos.intervals.iter())
            .flat_map(|&(a, b)| [a, b])
            .collect();
        edges.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(edges[0], 0.0);
        assert_abs_diff_eq!(*edges.last().unwrap(), 6.0);
        for pair in edges[1..edges.len() - 1].chunks(2) {
            assert_abs_diff_eq!(pair[0], pair[1], epsilon = 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(find_sign_changes(f64::sin, (1.0, 1.0), 100).is_err());
        assert!(find_sign_changes(f64::sin, (0.0, 1.0), 8).is_err());
    }
}
