//! Figure-scale parameter grids.
//!
//! Every grid point is an independent evaluation; points are dispatched to
//! the rayon pool and assembled by grid index, so the table does not depend
//! on evaluation order. A failing point is stored as NaN and described in
//! the `failures` metadata entry instead of aborting the sweep.

mod table;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::envmodels::{EnvKind, Environment, NonEqEnv, NonEqMode, SpectralDensity, ThermalEnv};
use crate::error::{Error, Result};
use crate::gp::{
    correction_noneq_perturbative, correction_thermal_perturbative, gp_evaluate, GpRun,
    DEFAULT_GRID,
};
use crate::numerics::QuadratureSpec;
use crate::qubit::BlochInitial;

pub use table::{Axis, Metadata, SweepTable};

/// Environment parameters held fixed over a sweep. Fields that do not apply
/// to the selected family are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvParams {
    pub gamma0: f64,
    pub cutoff: f64,
    pub temperature: f64,
    pub lambda: f64,
    pub d: f64,
    pub mode: NonEqMode,
}

impl Default for EnvParams {
    /// γ₀ = 0.1, Λ = 10, T = 0, λ = 0.3, d = 2, rebased.
    fn default() -> Self {
        Self {
            gamma0: 0.1,
            cutoff: 10.0,
            temperature: 0.0,
            lambda: 0.3,
            d: 2.0,
            mode: NonEqMode::Rebased,
        }
    }
}

impl EnvParams {
    pub fn environment(&self, kind: EnvKind, s: f64) -> Result<Environment> {
        self.environment_with_gamma0(kind, s, self.gamma0)
    }

    pub fn environment_with_gamma0(
        &self,
        kind: EnvKind,
        s: f64,
        gamma0: f64,
    ) -> Result<Environment> {
        let sd = SpectralDensity::new(gamma0, s, self.cutoff)?;
        Ok(match kind {
            EnvKind::Thermal => ThermalEnv::new(sd, self.temperature)?.into(),
            EnvKind::NonEquilibrium => NonEqEnv::new(sd, self.lambda, self.d, self.mode)?.into(),
        })
    }
}

/// Order in which grid points are evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PointOrder {
    /// Work-stealing over the rayon pool.
    #[default]
    Parallel,
    /// Sequentially, in the given permutation of point indices.
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub gp_grid: usize,
    pub quadrature: QuadratureSpec,
    pub order: PointOrder,
    /// Provenance tag such as `"fig1"`.
    pub figure: Option<String>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            gp_grid: DEFAULT_GRID,
            quadrature: QuadratureSpec::default(),
            order: PointOrder::Parallel,
            figure: None,
        }
    }
}

/// `D(t, s)` over a (s, t) grid.
pub fn diffusion_map(
    kind: EnvKind,
    fixed: &EnvParams,
    t_axis: &Axis,
    s_axis: &Axis,
    opts: &SweepOptions,
) -> Result<SweepTable> {
    let envs = environments(kind, fixed, &s_axis.points, fixed.gamma0)?;
    let nt = t_axis.len();
    let (values, failures) = evaluate(envs.len() * nt, 1, &opts.order, |i| {
        let env = &envs[i / nt];
        Ok(vec![env.diffusion(t_axis.points[i % nt], &opts.quadrature)?])
    })?;
    let mut meta = base_metadata(kind, fixed, opts, "diffusion");
    meta.insert("s_range".into(), range(&s_axis.points));
    meta.insert("t_range".into(), range(&t_axis.points));
    finish(
        vec![rename(s_axis, "s"), rename(t_axis, "t")],
        &["D"],
        values,
        meta,
        failures,
    )
}

/// `F(t)` for each `s` in `s_values`.
pub fn decoherence_curves(
    kind: EnvKind,
    fixed: &EnvParams,
    t_axis: &Axis,
    s_values: &[f64],
    opts: &SweepOptions,
) -> Result<SweepTable> {
    let s_axis = Axis::values("s", s_values.to_vec())?;
    let envs = environments(kind, fixed, s_values, fixed.gamma0)?;
    let nt = t_axis.len();
    let (values, failures) = evaluate(envs.len() * nt, 1, &opts.order, |i| {
        let env = &envs[i / nt];
        Ok(vec![
            env.decoherence(t_axis.points[i % nt], &opts.quadrature)?
        ])
    })?;
    let mut meta = base_metadata(kind, fixed, opts, "decoherence");
    meta.insert("s_range".into(), range(s_values));
    meta.insert("t_range".into(), range(&t_axis.points));
    finish(
        vec![s_axis, rename(t_axis, "t")],
        &["F"],
        values,
        meta,
        failures,
    )
}

const GP_COLUMNS: [&str; 5] = [
    "phi_g",
    "phi_u",
    "delta_phi",
    "normalized_delta",
    "perturbative",
];

/// Geometric-phase correction over `(γ₀, s)` at fixed `θ`.
pub fn gp_vs_s(
    kind: EnvKind,
    fixed: &EnvParams,
    s_axis: &Axis,
    gamma0_values: &[f64],
    theta: f64,
    opts: &SweepOptions,
) -> Result<SweepTable> {
    let init = BlochInitial::new(theta)?;
    let g_axis = Axis::values("gamma0", gamma0_values.to_vec())?;
    let mut envs = Vec::with_capacity(g_axis.len() * s_axis.len());
    for &g in gamma0_values {
        envs.extend(environments(kind, fixed, &s_axis.points, g)?);
    }
    let (values, failures) = evaluate(envs.len(), GP_COLUMNS.len(), &opts.order, |i| {
        gp_row(&envs[i], init, opts)
    })?;
    let mut meta = base_metadata(kind, fixed, opts, "geometric_phase");
    meta.insert("gamma0".into(), json!(gamma0_values));
    meta.insert("theta".into(), json!(theta));
    meta.insert("s_range".into(), range(&s_axis.points));
    finish(
        vec![g_axis, rename(s_axis, "s")],
        &GP_COLUMNS,
        values,
        meta,
        failures,
    )
}

/// Geometric-phase correction over `(set, s)` for a list of full parameter
/// sets; the `set` axis holds indices into `sets`, which are echoed in the
/// metadata.
pub fn gp_vs_s_sets(
    kind: EnvKind,
    sets: &[EnvParams],
    s_axis: &Axis,
    theta: f64,
    opts: &SweepOptions,
) -> Result<SweepTable> {
    let init = BlochInitial::new(theta)?;
    if sets.is_empty() {
        return Err(Error::Invalid(
            "at least one parameter set is required".into(),
        ));
    }
    let set_axis = Axis::values("set", (0..sets.len()).map(|i| i as f64).collect())?;
    let mut envs = Vec::with_capacity(sets.len() * s_axis.len());
    for p in sets {
        envs.extend(environments(kind, p, &s_axis.points, p.gamma0)?);
    }
    let (values, failures) = evaluate(envs.len(), GP_COLUMNS.len(), &opts.order, |i| {
        gp_row(&envs[i], init, opts)
    })?;
    let mut meta = base_metadata(kind, &sets[0], opts, "geometric_phase");
    for key in ["gamma0", "cutoff", "temperature", "lambda", "d", "mode"] {
        meta.insert(key.into(), Value::Null);
    }
    meta.insert("sets".into(), json!(sets));
    meta.insert("theta".into(), json!(theta));
    meta.insert("s_range".into(), range(&s_axis.points));
    finish(
        vec![set_axis, rename(s_axis, "s")],
        &GP_COLUMNS,
        values,
        meta,
        failures,
    )
}

/// Geometric-phase correction over `(s, θ)` at the fixed coupling.
pub fn gp_vs_theta(
    kind: EnvKind,
    fixed: &EnvParams,
    theta_axis: &Axis,
    s_values: &[f64],
    opts: &SweepOptions,
) -> Result<SweepTable> {
    let s_axis = Axis::values("s", s_values.to_vec())?;
    let inits = theta_axis
        .points
        .iter()
        .map(|&th| BlochInitial::new(th))
        .collect::<Result<Vec<_>>>()?;
    let envs = environments(kind, fixed, s_values, fixed.gamma0)?;
    let nth = inits.len();
    let (values, failures) = evaluate(envs.len() * nth, GP_COLUMNS.len(), &opts.order, |i| {
        gp_row(&envs[i / nth], inits[i % nth], opts)
    })?;
    let mut meta = base_metadata(kind, fixed, opts, "geometric_phase");
    meta.insert("s_range".into(), range(s_values));
    meta.insert("theta_range".into(), range(&theta_axis.points));
    finish(
        vec![s_axis, rename(theta_axis, "theta")],
        &GP_COLUMNS,
        values,
        meta,
        failures,
    )
}

fn gp_row(env: &Environment, init: BlochInitial, opts: &SweepOptions) -> Result<Vec<f64>> {
    let mut run = GpRun::new(init, *env).with_grid(opts.gp_grid)?;
    run.quadrature = opts.quadrature;
    let r = gp_evaluate(&run)?;
    let perturbative = match env {
        Environment::Thermal(e) if e.temperature() == 0.0 => {
            correction_thermal_perturbative(env.spectral(), &init).unwrap_or(f64::NAN)
        }
        Environment::Thermal(_) => f64::NAN,
        Environment::NonEq(_) => correction_noneq_perturbative(env.spectral(), &init),
    };
    let normalized = if r.phi_u != 0.0 {
        perturbative / r.phi_u
    } else {
        0.0
    };
    Ok(vec![
        r.phi_g,
        r.phi_u,
        r.delta_phi,
        r.normalized_delta,
        normalized,
    ])
}

fn environments(
    kind: EnvKind,
    fixed: &EnvParams,
    s_values: &[f64],
    gamma0: f64,
) -> Result<Vec<Environment>> {
    s_values
        .iter()
        .map(|&s| fixed.environment_with_gamma0(kind, s, gamma0))
        .collect()
}

fn rename(axis: &Axis, name: &str) -> Axis {
    Axis {
        name: name.to_string(),
        points: axis.points.clone(),
    }
}

type Failures = Vec<(usize, String)>;

fn evaluate<F>(count: usize, width: usize, order: &PointOrder, f: F) -> Result<(Vec<f64>, Failures)>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync,
{
    let results: Vec<Result<Vec<f64>>> = match order {
        PointOrder::Parallel => (0..count).into_par_iter().map(&f).collect(),
        PointOrder::Explicit(perm) => {
            let mut seen = vec![false; count];
            if perm.len() != count
                || perm
                    .iter()
                    .any(|&i| i >= count || std::mem::replace(&mut seen[i], true))
            {
                return Err(Error::Invalid(format!(
                    "explicit point order must be a permutation of 0..{count}"
                )));
            }
            let mut slots: Vec<Option<Result<Vec<f64>>>> = (0..count).map(|_| None).collect();
            for &i in perm {
                slots[i] = Some(f(i));
            }
            slots
                .into_iter()
                .map(|s| s.expect("permutation covers every point"))
                .collect()
        }
    };
    let mut values = Vec::with_capacity(count * width);
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(row) => values.extend(row),
            Err(e) => {
                values.extend(std::iter::repeat_n(f64::NAN, width));
                failures.push((i, e.to_string()));
            }
        }
    }
    Ok((values, failures))
}

fn range(points: &[f64]) -> Value {
    let min = points.iter().copied().fold(f64::INFINITY, f64::min);
    let max = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    json!({ "min": min, "max": max, "count": points.len() })
}

fn base_metadata(
    kind: EnvKind,
    fixed: &EnvParams,
    opts: &SweepOptions,
    quantity: &str,
) -> Metadata {
    let thermal = kind == EnvKind::Thermal;
    let mut m = Metadata::new();
    m.insert("tool".into(), json!("gpdephase"));
    m.insert("version".into(), json!(crate::VERSION));
    m.insert("figure".into(), json!(opts.figure));
    m.insert("quantity".into(), json!(quantity));
    m.insert("environment".into(), json!(kind.to_string()));
    m.insert("gamma0".into(), json!(fixed.gamma0));
    m.insert("cutoff".into(), json!(fixed.cutoff));
    m.insert(
        "temperature".into(),
        if thermal {
            json!(fixed.temperature)
        } else {
            Value::Null
        },
    );
    m.insert(
        "lambda".into(),
        if thermal {
            Value::Null
        } else {
            json!(fixed.lambda)
        },
    );
    m.insert(
        "d".into(),
        if thermal { Value::Null } else { json!(fixed.d) },
    );
    m.insert(
        "mode".into(),
        if thermal {
            Value::Null
        } else {
            json!(fixed.mode)
        },
    );
    m.insert("theta".into(), Value::Null);
    m.insert("gp_grid".into(), json!(opts.gp_grid));
    m.insert(
        "relative_tolerance".into(),
        json!(opts.quadrature.relative_tolerance),
    );
    m.insert(
        "absolute_tolerance".into(),
        json!(opts.quadrature.absolute_tolerance),
    );
    m.insert(
        "max_subdivisions".into(),
        json!(opts.quadrature.max_subdivisions),
    );
    m
}

fn finish(
    axes: Vec<Axis>,
    columns: &[&str],
    values: Vec<f64>,
    mut meta: Metadata,
    failures: Failures,
) -> Result<SweepTable> {
    let list: Vec<Value> = failures
        .into_iter()
        .map(|(i, msg)| json!({ "point": i, "error": msg }))
        .collect();
    meta.insert("failures".into(), Value::Array(list));
    SweepTable::new(
        axes,
        columns.iter().map(|c| c.to_string()).collect(),
        values,
        meta,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small_opts() -> SweepOptions {
        SweepOptions {
            gp_grid: 256,
            ..Default::default()
        }
    }

    #[test]
    fn thermal_map_signs() {
        let t = Axis::half_open("t", 3.0, 60).unwrap();
        let s = Axis::values("s", vec![1.0, 4.0]).unwrap();
        let table = diffusion_map(
            EnvKind::Thermal,
            &EnvParams::default(),
            &t,
            &s,
            &small_opts(),
        )
        .unwrap();
        let d = table.column("D").unwrap();
        assert!(d[..60].iter().all(|&v| v >= 0.0));
        assert!(d[60..].iter().any(|&v| v < 0.0));
        assert_eq!(table.metadata["environment"], "thermal");
    }

    #[test]
    fn order_independence() {
        let t = Axis::half_open("t", 2.0, 8).unwrap();
        let s = Axis::linspace("s", 0.5, 3.5, 5).unwrap();
        let params = EnvParams::default();
        let parallel =
            diffusion_map(EnvKind::NonEquilibrium, &params, &t, &s, &small_opts()).unwrap();
        let mut perm: Vec<usize> = (0..40).collect();
        perm.reverse();
        perm.swap(3, 17);
        let opts = SweepOptions {
            order: PointOrder::Explicit(perm),
            ..small_opts()
        };
        let shuffled = diffusion_map(EnvKind::NonEquilibrium, &params, &t, &s, &opts).unwrap();
        assert_eq!(parallel, shuffled);
    }

    #[test]
    fn bad_permutation() {
        let t = Axis::half_open("t", 2.0, 4).unwrap();
        let s = Axis::values("s", vec![1.0]).unwrap();
        let opts = SweepOptions {
            order: PointOrder::Explicit(vec![0, 0, 1, 2]),
            ..small_opts()
        };
        assert!(diffusion_map(EnvKind::Thermal, &EnvParams::default(), &t, &s, &opts).is_err());
    }

    #[test]
    fn failures_are_flagged() {
        // Finite-temperature decoherence is undefined for s <= 0.
        let params = EnvParams {
            temperature: 1.0,
            ..Default::default()
        };
        let t = Axis::half_open("t", 1.0, 4).unwrap();
        let table =
            decoherence_curves(EnvKind::Thermal, &params, &t, &[-0.5, 1.0], &small_opts()).unwrap();
        assert_eq!(table.flagged(), 4);
        assert_eq!(table.metadata["failures"].as_array().unwrap().len(), 4);
        assert!(table.values[4..].iter().all(|v| v.is_finite()));
    }

    #[test]
    fn theta_endpoints_have_no_correction() {
        let params = EnvParams {
            gamma0: 0.01,
            ..Default::default()
        };
        let theta = Axis::linspace("theta", 0.0, PI, 5).unwrap();
        let table = gp_vs_theta(
            EnvKind::Thermal,
            &params,
            &theta,
            &[2.0],
            &SweepOptions::default(),
        )
        .unwrap();
        let delta = table.column("delta_phi").unwrap();
        assert_eq!(delta[0], 0.0);
        assert_eq!(delta[4], 0.0);
        assert!(delta[1] * delta[3] < 0.0);
    }

    #[test]
    fn invalid_parameters_rejected() {
        let t = Axis::half_open("t", 1.0, 4).unwrap();
        let s = Axis::values("s", vec![-2.0]).unwrap();
        assert!(diffusion_map(
            EnvKind::Thermal,
            &EnvParams::default(),
            &t,
            &s,
            &small_opts()
        )
        .is_err());
    }
}
