//! Dispatch a resolved configuration to the core sweeps.

use std::time::Instant;

use gpdephase_core::envmodels::markovianity_report;
use gpdephase_core::gp::{
    correction_noneq_perturbative, correction_thermal_perturbative, gp_evaluate,
};
use gpdephase_core::sweep::{self, Metadata, SweepOptions};
use gpdephase_core::{Axis, BlochInitial, EnvKind, Environment, GpRun, SweepTable};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, Figure, Format, RunConfig, SChoice, ThetaChoice};
use crate::error::Result;
use crate::output::{verify_manifest, write_table, Manifest};
use crate::plot::{write_plot_script, PlotStyle};

fn s_axis(choice: &SChoice) -> Result<Axis> {
    Ok(match choice {
        SChoice::Values(v) => Axis::values("s", v.clone())?,
        SChoice::Range {
            min: Some(min),
            max,
            count,
        } => Axis::linspace("s", *min, *max, *count)?,
        SChoice::Range {
            min: None,
            max,
            count,
        } => Axis::half_open("s", *max, *count)?,
    })
}

fn theta_axis(choice: ThetaChoice) -> Result<Axis> {
    Ok(match choice {
        ThetaChoice::Single(t) => Axis::values("theta", vec![t])?,
        ThetaChoice::Range { min, max, count } => Axis::linspace("theta", min, max, count)?,
    })
}

fn single_theta(choice: ThetaChoice) -> f64 {
    match choice {
        ThetaChoice::Single(t) => t,
        ThetaChoice::Range { min, .. } => min,
    }
}

fn options(cfg: &RunConfig) -> SweepOptions {
    SweepOptions {
        gp_grid: cfg.grid,
        quadrature: cfg.quadrature,
        figure: match cfg.command {
            Command::Figure(f) => Some(f.tag().to_string()),
            _ => None,
        },
        ..Default::default()
    }
}

/// What to plot for this command: column name and layout.
pub fn plot_request(cfg: &RunConfig) -> (&'static str, PlotStyle) {
    match cfg.command {
        Command::DiffusionMap | Command::Figure(Figure::Fig1 | Figure::Fig3) => {
            ("D", PlotStyle::Density)
        }
        Command::Decoherence | Command::Figure(Figure::Fig2 | Figure::Fig4) => {
            ("F", PlotStyle::Curves)
        }
        Command::Markovianity => ("first_crossing", PlotStyle::Curves),
        Command::Gp => ("delta_phi", PlotStyle::Curves),
        Command::Figure(Figure::Fig6) => ("delta_phi", PlotStyle::Curves),
        Command::GpSweep if matches!(cfg.theta, ThetaChoice::Range { .. }) => {
            ("delta_phi", PlotStyle::Curves)
        }
        Command::GpSweep | Command::Figure(Figure::Fig5 | Figure::Fig7) => {
            ("normalized_delta", PlotStyle::Curves)
        }
    }
}

/// Evaluate the table for `cfg` without touching the filesystem.
pub fn compute(cfg: &RunConfig) -> Result<SweepTable> {
    let opts = options(cfg);
    let p = &cfg.params;
    let mut table = match cfg.command {
        Command::Decoherence | Command::Figure(Figure::Fig2 | Figure::Fig4) => {
            let t = Axis::linspace("t", 0.0, cfg.t_max, cfg.t_count)?;
            sweep::decoherence_curves(cfg.kind, p, &t, &s_axis(&cfg.s)?.points, &opts)?
        }
        Command::DiffusionMap | Command::Figure(Figure::Fig1 | Figure::Fig3) => {
            let t = Axis::half_open("t", cfg.t_max, cfg.t_count)?;
            sweep::diffusion_map(cfg.kind, p, &t, &s_axis(&cfg.s)?, &opts)?
        }
        Command::Markovianity => markovianity_table(cfg, &opts)?,
        Command::Gp => gp_table(cfg, &opts)?,
        Command::GpSweep | Command::Figure(Figure::Fig5 | Figure::Fig6) => match cfg.theta {
            ThetaChoice::Range { .. } => sweep::gp_vs_theta(
                cfg.kind,
                p,
                &theta_axis(cfg.theta)?,
                &s_axis(&cfg.s)?.points,
                &opts,
            )?,
            ThetaChoice::Single(theta) => {
                let g = cfg.gamma0_values.clone().unwrap_or_else(|| vec![p.gamma0]);
                sweep::gp_vs_s(cfg.kind, p, &s_axis(&cfg.s)?, &g, theta, &opts)?
            }
        },
        Command::Figure(Figure::Fig7) => {
            let sets = cfg.sets.clone().unwrap_or_else(|| vec![*p]);
            sweep::gp_vs_s_sets(
                cfg.kind,
                &sets,
                &s_axis(&cfg.s)?,
                single_theta(cfg.theta),
                &opts,
            )?
        }
    };
    table
        .metadata
        .insert("command".into(), json!(cfg.command.name()));
    table.metadata.insert(
        "config".into(),
        serde_json::to_value(cfg).unwrap_or(Value::Null),
    );
    Ok(table)
}

fn common_metadata(cfg: &RunConfig, opts: &SweepOptions, quantity: &str) -> Metadata {
    let p = &cfg.params;
    let thermal = cfg.kind == EnvKind::Thermal;
    let opt = |cond: bool, v: Value| if cond { v } else { Value::Null };
    let mut m = Metadata::new();
    m.insert("tool".into(), json!("gpdephase"));
    m.insert("version".into(), json!(gpdephase_core::VERSION));
    m.insert("figure".into(), json!(opts.figure));
    m.insert("quantity".into(), json!(quantity));
    m.insert("environment".into(), json!(cfg.kind.to_string()));
    m.insert("gamma0".into(), json!(p.gamma0));
    m.insert("cutoff".into(), json!(p.cutoff));
    m.insert("temperature".into(), opt(thermal, json!(p.temperature)));
    m.insert("lambda".into(), opt(!thermal, json!(p.lambda)));
    m.insert("d".into(), opt(!thermal, json!(p.d)));
    m.insert("mode".into(), opt(!thermal, json!(p.mode)));
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

fn markovianity_table(cfg: &RunConfig, opts: &SweepOptions) -> Result<SweepTable> {
    let axis = s_axis(&cfg.s)?;
    let envs = axis
        .points
        .iter()
        .map(|&s| cfg.params.environment(cfg.kind, s))
        .collect::<gpdephase_core::Result<Vec<Environment>>>()?;
    let reports: Vec<_> = envs
        .par_iter()
        .map(|env| markovianity_report(env, (0.0, cfg.t_max), cfg.samples, &cfg.quadrature))
        .collect();
    let mut values = Vec::with_capacity(4 * envs.len());
    let mut intervals = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in reports.into_iter().enumerate() {
        match r {
            Ok(r) => {
                values.extend([
                    if r.is_markovian_on_window { 1.0 } else { 0.0 },
                    r.negative_intervals.first_crossing.unwrap_or(f64::NAN),
                    r.negative_intervals.intervals.len() as f64,
                    r.min_diffusion,
                ]);
                intervals.push(json!(r.negative_intervals.intervals));
            }
            Err(e) => {
                values.extend([f64::NAN; 4]);
                intervals.push(Value::Null);
                failures.push(json!({ "point": i, "error": e.to_string() }));
            }
        }
    }
    let mut meta = common_metadata(cfg, opts, "markovianity");
    meta.insert(
        "t_range".into(),
        json!({ "min": 0.0, "max": cfg.t_max, "count": cfg.samples }),
    );
    meta.insert("negative_intervals".into(), Value::Array(intervals));
    meta.insert("failures".into(), Value::Array(failures));
    Ok(SweepTable::new(
        vec![axis],
        ["markovian", "first_crossing", "negative_intervals", "min_D"]
            .map(String::from)
            .to_vec(),
        values,
        meta,
    )?)
}

fn gp_table(cfg: &RunConfig, opts: &SweepOptions) -> Result<SweepTable> {
    let s = s_axis(&cfg.s)?.points[0];
    let theta = single_theta(cfg.theta);
    let init = BlochInitial::new(theta)?;
    let env = cfg.params.environment(cfg.kind, s)?;
    let mut run = GpRun::new(init, env).with_grid(cfg.grid)?;
    run.quadrature = cfg.quadrature;
    let r = gp_evaluate(&run)?;
    let perturbative = match env {
        Environment::Thermal(e) if e.temperature() == 0.0 => {
            correction_thermal_perturbative(env.spectral(), &init)?
        }
        Environment::Thermal(_) => f64::NAN,
        Environment::NonEq(_) => correction_noneq_perturbative(env.spectral(), &init),
    };
    let mut meta = common_metadata(cfg, opts, "geometric_phase");
    meta.insert("s".into(), json!(s));
    meta.insert("theta".into(), json!(theta));
    meta.insert("failures".into(), json!([]));
    Ok(SweepTable::new(
        vec![],
        [
            "phi_g",
            "phi_u",
            "delta_phi",
            "normalized_delta",
            "grid_points",
            "richardson_gap",
            "perturbative",
        ]
        .map(String::from)
        .to_vec(),
        vec![
            r.phi_g,
            r.phi_u,
            r.delta_phi,
            r.normalized_delta,
            r.grid_points as f64,
            r.richardson_gap,
            perturbative,
        ],
        meta,
    )?)
}

/// Compute, write the table (and plot script), and verify what was written.
pub fn run(cfg: &RunConfig) -> Result<Manifest> {
    let start = Instant::now();
    let table = compute(cfg)?;
    let mut files = vec![write_table(&table, cfg.output.format, &cfg.output.path)?];
    if cfg.output.plot_script && cfg.output.format == Format::Csv {
        let (column, style) = plot_request(cfg);
        files.push(write_plot_script(&cfg.output.path, column, style)?);
    }
    let failed_points = table
        .metadata
        .get("failures")
        .and_then(Value::as_array)
        .map_or(0, Vec::len);
    let manifest = Manifest {
        tool: "gpdephase".into(),
        version: gpdephase_core::VERSION.into(),
        command: cfg.command.name(),
        files,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        points: table.points(),
        failed_points,
        non_finite_values: table.flagged(),
        parameters: serde_json::to_value(cfg).unwrap_or(Value::Null),
    };
    verify_manifest(&manifest)?;
    Ok(manifest)
}
