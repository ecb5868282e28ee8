use std::cell::{Cell, RefCell};

use serde::{Deserialize, Serialize};

use super::{EnvKind, Environment};
use crate::error::{Error, Result};
use crate::numerics::{find_sign_changes, QuadratureSpec, SignChangeReport};

/// Negative-diffusion diagnostic over a time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub environment_kind: EnvKind,
    pub negative_intervals: SignChangeReport,
    pub is_markovian_on_window: bool,
    /// Smallest `D(t)` seen while scanning.
    pub min_diffusion: f64,
}

/// Scan `D(t)` on `window` and report where it is negative. The dynamics is
/// flagged Markovian iff no negative interval is found.
pub fn markovianity_report(
    env: &Environment,
    window: (f64, f64),
    samples: usize,
    spec: &QuadratureSpec,
) -> Result<MarkovReport> {
    if !(window.1 > 0.0 && window.0 >= 0.0) {
        return Err(Error::Invalid(format!(
            "markovianity window must satisfy 0 <= t0 < t_max, got ({}, {})",
            window.0, window.1
        )));
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let min = Cell::new(f64::INFINITY);
    let probe = |t: f64| match env.diffusion(t, spec) {
        Ok(v) => {
            min.set(min.get().min(v));
            v
        }
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let scan = find_sign_changes(probe, window, samples);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let negative_intervals = scan?;
    Ok(MarkovReport {
        environment_kind: env.kind(),
        is_markovian_on_window: negative_intervals.is_empty(),
        negative_intervals,
        min_diffusion: min.get(),
    })
}
