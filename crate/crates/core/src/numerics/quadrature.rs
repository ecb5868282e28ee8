use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and work limit for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    /// Bisections allowed beyond the initial panel layout.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-9,
            absolute_tolerance: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        relative_tolerance: f64,
        absolute_tolerance: f64,
        max_subdivisions: usize,
    ) -> Result<Self> {
        let spec = Self {
            relative_tolerance,
            absolute_tolerance,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance.is_finite()) {
            return Err(Error::Domain {
                name: "relative_tolerance",
                value: self.relative_tolerance,
                rule: "must be positive",
            });
        }
        if !(self.absolute_tolerance > 0.0 && self.absolute_tolerance.is_finite()) {
            return Err(Error::Domain {
                name: "absolute_tolerance",
                value: self.absolute_tolerance,
                rule: "must be positive",
            });
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Domain {
                name: "max_subdivisions",
                value: self.max_subdivisions as f64,
                rule: "must be at least 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

/// Shape hints for [`integrate_semi_infinite_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiInfiniteOptions {
    /// Lower limit of integration.
    pub lower: f64,
    /// Decay length of the integrand (e.g. the cutoff of a spectral density).
    pub scale: f64,
    /// Angular frequency of any oscillatory factor; 0 if none.
    pub frequency: f64,
    /// Power-law exponent `p` of the integrand at the origin (`f ~ ω^p`),
    /// used to pick a smoothing substitution when `lower == 0`.
    pub origin_exponent: Option<f64>,
}

impl Default for SemiInfiniteOptions {
    fn default() -> Self {
        Self {
            lower: 0.0,
            scale: 1.0,
            frequency: 0.0,
            origin_exponent: None,
        }
    }
}

// Gauss-Kronrod 21-point abscissae and weights; odd indices are shared
// with the 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

// Number of decay lengths covered by explicit panels before the tail map.
const TAIL_EFOLDS: f64 = 40.0;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    kind: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

type Integrand<'a> = &'a dyn Fn(f64) -> f64;

fn gk21(f: Integrand, a: f64, b: f64, kind: usize) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { at: x })
        }
    };

    let fc = eval(centre)?;
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(centre - dx)?;
        let f2 = eval(centre + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        kind,
    })
}

/// Adaptive bisection driven by a max-heap on the panel error estimates.
/// `fs[kind]` is the integrand used on panels of that kind.
fn adaptive(
    fs: &[Integrand],
    layout: &[(f64, f64, usize)],
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    spec.validate()?;
    let mut heap = BinaryHeap::with_capacity(layout.len() + 2 * spec.max_subdivisions);
    let mut total = 0.0;
    let mut error = 0.0;
    for &(a, b, kind) in layout {
        let panel = gk21(fs[kind], a, b, kind)?;
        total += panel.value;
        error += panel.error;
        heap.push(panel);
    }
    let mut evaluations = 21 * layout.len();
    let mut subdivisions = 0;

    loop {
        let tolerance = spec
            .absolute_tolerance
            .max(spec.relative_tolerance * total.abs());
        if error <= tolerance {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            let (value, error_estimate) = sum_heap(&heap);
            return Err(Error::Convergence {
                estimate: value,
                error_estimate,
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else { break };
        if worst.error == 0.0 {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot bisect further; keep the panel but stop charging its error.
            error -= worst.error;
            heap.push(Panel {
                error: 0.0,
                ..worst
            });
            continue;
        }
        let f = fs[worst.kind];
        let left = gk21(f, worst.a, mid, worst.kind)?;
        let right = gk21(f, mid, worst.b, worst.kind)?;
        evaluations += 42;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Guard against drift in the running sums.
        if subdivisions % 256 == 0 {
            (total, error) = sum_heap(&heap);
        }
    }

    let (value, error_estimate) = sum_heap(&heap);
    Ok(Quadrature {
        value,
        error_estimate,
        subdivisions,
        evaluations,
    })
}

fn sum_heap(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.kind.cmp(&q.kind)));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// Adaptive Gauss-Kronrod integration over a finite interval `[a, b]`.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Invalid(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fs: [Integrand; 1] = [&f];
    let mut q = adaptive(&fs, &[(lo, hi, 0)], spec)?;
    q.value *= sign;
    Ok(q)
}

/// `∫₀^∞ f(ω) dω` for an exponentially damped integrand with unit decay length.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    integrate_semi_infinite_with(f, spec, &SemiInfiniteOptions::default())
}

/// `∫_lower^∞ f(ω) dω` with shape hints.
///
/// The range is laid out as an origin panel (power substitution when the
/// lower limit is 0), geometrically growing panels up to one decay length,
/// uniform panels no wider than a quarter oscillation period up to
/// `40·scale`, and a tail mapped onto `[0, 1)` via `ω = b + scale·u/(1−u)`.
pub fn integrate_semi_infinite_with<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadratureSpec,
    opts: &SemiInfiniteOptions,
) -> Result<Quadrature> {
    let SemiInfiniteOptions {
        lower,
        scale,
        frequency,
        origin_exponent,
    } = *opts;
    if !(lower.is_finite() && lower >= 0.0) {
        return Err(Error::Domain {
            name: "lower",
            value: lower,
            rule: "lower limit must be finite and non-negative",
        });
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Domain {
            name: "scale",
            value: scale,
            rule: "decay length must be positive",
        });
    }
    if !(frequency.is_finite() && frequency >= 0.0) {
        return Err(Error::Domain {
            name: "frequency",
            value: frequency,
            rule: "oscillation frequency must be finite and non-negative",
        });
    }
    if let Some(p) = origin_exponent {
        if p.is_nan() || p <= -1.0 {
            return Err(Error::Domain {
                name: "origin_exponent",
                value: p,
                rule: "integrand must be integrable at the origin (p > -1)",
            });
        }
    }

    let max_width = if frequency > 0.0 {
        (PI / (4.0 * frequency)).min(scale)
    } else {
        scale
    };
    let tail_start = lower + TAIL_EFOLDS * scale;

    let mut layout = Vec::new();
    let mut x = lower;
    let mut origin = None;
    if lower == 0.0 {
        let h0 = (0.125 * scale).min(max_width);
        let m = match origin_exponent {
            Some(p) => (2.0 / (p + 1.0)).ceil().clamp(1.0, 64.0),
            None => 2.0,
        };
        origin = Some((h0, m));
        layout.push((0.0, 1.0, 0));
        x = h0;
    }
    while x < tail_start {
        let grow = if x > 0.0 { x } else { max_width };
        let next = (x + grow.min(max_width)).min(tail_start);
        layout.push((x, next, 1));
        x = next;
    }
    layout.push((0.0, 1.0, 2));

    let origin_f = |v: f64| -> f64 {
        match origin {
            Some((h0, m)) => {
                let w = h0 * v.powf(m);
                let jac = h0 * m * v.powf(m - 1.0);
                if jac == 0.0 {
                    0.0
                } else {
                    f(w) * jac
                }
            }
            None => 0.0,
        }
    };
    let tail_f = |u: f64| -> f64 {
        let q = 1.0 - u;
        let w = tail_start + scale * u / q;
        let y = f(w);
        if y == 0.0 {
            0.0
        } else {
            y * scale / (q * q)
        }
    };
    let fs: [Integrand; 3] = [&origin_f, &f, &tail_f];
    adaptive(&fs, &layout, spec)
}
