//! Run configuration: TOML file and command-line flags, merged over
//! per-command defaults and validated.
//!
//! ```toml
//! [environment]
//! kind = "thermal"        # or "noneq"
//! gamma0 = 0.1
//! s = 3.0                 # or s_min/s_max/s_count, or s_values = [...]
//! cutoff = 10.0
//! temperature = 0.0       # thermal only
//! lambda = 0.3            # noneq only
//! d = 2.0                 # noneq only
//! mode = "rebased"        # noneq only: "rebased" or "raw"
//! gamma0_values = [0.001, 0.005]
//!
//! [state]
//! theta = 1.0472          # or theta_min/theta_max/theta_count
//!
//! [numeric]
//! t_max = 3.0
//! t_count = 301
//! samples = 2000
//! grid = 4096
//! relative_tolerance = 1e-9
//! absolute_tolerance = 1e-12
//! max_subdivisions = 2000
//!
//! [output]
//! path = "out.csv"
//! format = "csv"
//! plot_script = false
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use gpdephase_core::sweep::EnvParams;
use gpdephase_core::{EnvKind, NonEqMode, QuadratureSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    pub fn tag(&self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }

    fn kind(&self) -> EnvKind {
        match self {
            Figure::Fig3 | Figure::Fig4 | Figure::Fig7 => EnvKind::NonEquilibrium,
            _ => EnvKind::Thermal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name", content = "figure")]
pub enum Command {
    Decoherence,
    DiffusionMap,
    Markovianity,
    Gp,
    GpSweep,
    Figure(Figure),
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Decoherence => "decoherence".into(),
            Command::DiffusionMap => "diffusion-map".into(),
            Command::Markovianity => "markovianity".into(),
            Command::Gp => "gp".into(),
            Command::GpSweep => "gp-sweep".into(),
            Command::Figure(f) => f.tag().into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

// ---------------------------------------------------------------------------
// Partial (file or flag) layer

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    #[serde(default)]
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub numeric: NumericSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub kind: Option<String>,
    pub gamma0: Option<f64>,
    pub gamma0_values: Option<Vec<f64>>,
    pub s: Option<f64>,
    pub s_min: Option<f64>,
    pub s_max: Option<f64>,
    pub s_count: Option<usize>,
    pub s_values: Option<Vec<f64>>,
    pub cutoff: Option<f64>,
    pub temperature: Option<f64>,
    pub lambda: Option<f64>,
    pub d: Option<f64>,
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub theta: Option<f64>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub theta_count: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSection {
    pub t_max: Option<f64>,
    pub t_count: Option<usize>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub relative_tolerance: Option<f64>,
    pub absolute_tolerance: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot_script: Option<bool>,
}

impl EnvironmentSection {
    fn has_s(&self) -> bool {
        self.s.is_some()
            || self.s_min.is_some()
            || self.s_max.is_some()
            || self.s_count.is_some()
            || self.s_values.is_some()
    }
}

impl StateSection {
    fn has_theta(&self) -> bool {
        self.theta.is_some()
            || self.theta_min.is_some()
            || self.theta_max.is_some()
            || self.theta_count.is_some()
    }
}

fn field(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

impl PartialConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::ConfigFile(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Contradictions inside a single layer.
    fn check_conflicts(&self) -> Result<()> {
        let e = &self.environment;
        if e.s.is_some()
            && (e.s_min.is_some()
                || e.s_max.is_some()
                || e.s_count.is_some()
                || e.s_values.is_some())
        {
            return Err(field(
                "environment.s",
                "a single s conflicts with an s range or s_values",
            ));
        }
        if e.s_values.is_some() && (e.s_min.is_some() || e.s_max.is_some() || e.s_count.is_some()) {
            return Err(field(
                "environment.s_values",
                "s_values conflicts with an s range",
            ));
        }
        if e.gamma0.is_some() && e.gamma0_values.is_some() {
            return Err(field(
                "environment.gamma0_values",
                "give either gamma0 or gamma0_values",
            ));
        }
        let st = &self.state;
        if st.theta.is_some()
            && (st.theta_min.is_some() || st.theta_max.is_some() || st.theta_count.is_some())
        {
            return Err(field(
                "state.theta",
                "a single theta conflicts with a theta range",
            ));
        }
        Ok(())
    }

    /// `over` wins field by field; the s and θ selections are replaced as a
    /// group so that a flag `--s` cleanly overrides a file range.
    pub fn merge(self, over: PartialConfig) -> PartialConfig {
        let (b, o) = (self.environment, over.environment);
        let (s, s_min, s_max, s_count, s_values) = if o.has_s() {
            (o.s, o.s_min, o.s_max, o.s_count, o.s_values)
        } else {
            (b.s, b.s_min, b.s_max, b.s_count, b.s_values)
        };
        let (gamma0, gamma0_values) = if o.gamma0.is_some() || o.gamma0_values.is_some() {
            (o.gamma0, o.gamma0_values)
        } else {
            (b.gamma0, b.gamma0_values)
        };
        let environment = EnvironmentSection {
            kind: o.kind.or(b.kind),
            gamma0,
            gamma0_values,
            s,
            s_min,
            s_max,
            s_count,
            s_values,
            cutoff: o.cutoff.or(b.cutoff),
            temperature: o.temperature.or(b.temperature),
            lambda: o.lambda.or(b.lambda),
            d: o.d.or(b.d),
            mode: o.mode.or(b.mode),
        };
        let state = if over.state.has_theta() {
            over.state
        } else {
            self.state
        };
        let (bn, on) = (self.numeric, over.numeric);
        let numeric = NumericSection {
            t_max: on.t_max.or(bn.t_max),
            t_count: on.t_count.or(bn.t_count),
            samples: on.samples.or(bn.samples),
            grid: on.grid.or(bn.grid),
            relative_tolerance: on.relative_tolerance.or(bn.relative_tolerance),
            absolute_tolerance: on.absolute_tolerance.or(bn.absolute_tolerance),
            max_subdivisions: on.max_subdivisions.or(bn.max_subdivisions),
        };
        let (bo, oo) = (self.output, over.output);
        let output = OutputSection {
            path: oo.path.or(bo.path),
            format: oo.format.or(bo.format),
            plot_script: oo.plot_script.or(bo.plot_script),
        };
        PartialConfig {
            environment,
            state,
            numeric,
            output,
        }
    }
}

// ---------------------------------------------------------------------------
// Resolved configuration

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SChoice {
    Values(Vec<f64>),
    /// `count` points on `[min, max]`, or on `(0, max]` when `min` is absent.
    Range {
        min: Option<f64>,
        max: f64,
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaChoice {
    Single(f64),
    Range { min: f64, max: f64, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: Format,
    pub plot_script: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub kind: EnvKind,
    pub params: EnvParams,
    pub s: SChoice,
    pub gamma0_values: Option<Vec<f64>>,
    pub theta: ThetaChoice,
    pub t_max: f64,
    pub t_count: usize,
    pub samples: usize,
    pub grid: usize,
    pub quadrature: QuadratureSpec,
    pub output: OutputConfig,
    /// Explicit parameter sets (fig7 only).
    pub sets: Option<Vec<EnvParams>>,
}

fn parse_kind(text: &str) -> Result<EnvKind> {
    match text {
        "thermal" => Ok(EnvKind::Thermal),
        "noneq" | "non-equilibrium" => Ok(EnvKind::NonEquilibrium),
        other => Err(field(
            "environment.kind",
            format!("unknown environment {other:?} (expected \"thermal\" or \"noneq\")"),
        )),
    }
}

/// Merge `file` (if any) and `flags`, fill per-command defaults and validate.
pub fn load_config(
    command: Command,
    file: Option<&Path>,
    flags: PartialConfig,
) -> Result<RunConfig> {
    let base = match file {
        Some(p) => PartialConfig::from_file(p)?,
        None => PartialConfig::default(),
    };
    base.check_conflicts()?;
    flags.check_conflicts()?;
    resolve(command, base.merge(flags))
}

pub fn resolve(command: Command, user: PartialConfig) -> Result<RunConfig> {
    user.check_conflicts()?;
    let env = &user.environment;

    let kind = match (command, &env.kind) {
        (Command::Figure(f), Some(k)) => {
            let k = parse_kind(k)?;
            if k != f.kind() {
                return Err(field(
                    "environment.kind",
                    format!("{} is defined for the {} environment", f.tag(), f.kind()),
                ));
            }
            k
        }
        (Command::Figure(f), None) => f.kind(),
        (_, Some(k)) => parse_kind(k)?,
        (_, None) => EnvKind::Thermal,
    };

    match kind {
        EnvKind::Thermal => {
            for (name, set) in [
                ("environment.lambda", env.lambda.is_some()),
                ("environment.d", env.d.is_some()),
                ("environment.mode", env.mode.is_some()),
            ] {
                if set {
                    return Err(field(name, "only applies to the noneq environment"));
                }
            }
        }
        EnvKind::NonEquilibrium => {
            if env.temperature.is_some() {
                return Err(field(
                    "environment.temperature",
                    "only applies to the thermal environment",
                ));
            }
        }
    }

    let gp_like = matches!(
        command,
        Command::Gp
            | Command::GpSweep
            | Command::Figure(Figure::Fig5 | Figure::Fig6 | Figure::Fig7)
    );
    let (default_lambda, default_d) = if gp_like { (0.5, 1.0) } else { (0.3, 2.0) };
    let default_gamma0 = match command {
        Command::Gp | Command::GpSweep | Command::Figure(Figure::Fig6) => 0.01,
        _ => 0.1,
    };
    let mode = match &env.mode {
        Some(m) => m
            .parse::<NonEqMode>()
            .map_err(|e| field("environment.mode", e.to_string()))?,
        None => NonEqMode::Rebased,
    };
    let params = EnvParams {
        gamma0: env.gamma0.unwrap_or(default_gamma0),
        cutoff: env.cutoff.unwrap_or(10.0),
        temperature: env.temperature.unwrap_or(0.0),
        lambda: env.lambda.unwrap_or(default_lambda),
        d: env.d.unwrap_or(default_d),
        mode,
    };

    let theta_sweep = user.state.theta_min.is_some()
        || user.state.theta_max.is_some()
        || user.state.theta_count.is_some();

    let s = if let Some(v) = env.s {
        SChoice::Values(vec![v])
    } else if let Some(v) = &env.s_values {
        SChoice::Values(v.clone())
    } else if env.s_min.is_some() || env.s_max.is_some() || env.s_count.is_some() {
        let (dmin, dmax, dcount) = default_s_range(command);
        SChoice::Range {
            min: env.s_min.or(dmin),
            max: env.s_max.unwrap_or(dmax),
            count: env.s_count.unwrap_or(dcount),
        }
    } else {
        default_s(command, kind, theta_sweep)
    };

    let gamma0_values = match (&env.gamma0_values, command) {
        (Some(v), Command::GpSweep | Command::Figure(Figure::Fig5 | Figure::Fig7)) => {
            Some(v.clone())
        }
        (Some(_), _) => {
            return Err(field(
                "environment.gamma0_values",
                format!("not used by {}", command.name()),
            ))
        }
        (None, Command::GpSweep) if !theta_sweep && env.gamma0.is_none() => {
            Some(vec![0.001, 0.005, 0.01, 0.03])
        }
        (None, Command::Figure(Figure::Fig5)) if env.gamma0.is_none() => {
            Some(vec![0.001, 0.005, 0.01, 0.03])
        }
        (None, Command::GpSweep | Command::Figure(Figure::Fig5)) => Some(vec![params.gamma0]),
        (None, _) => None,
    };
    if theta_sweep && gamma0_values.as_ref().is_some_and(|v| v.len() > 1) {
        return Err(field(
            "environment.gamma0_values",
            "a theta sweep uses a single gamma0",
        ));
    }

    let st = &user.state;
    let theta = if let Some(t) = st.theta {
        ThetaChoice::Single(t)
    } else if theta_sweep {
        ThetaChoice::Range {
            min: st.theta_min.unwrap_or(0.0),
            max: st.theta_max.unwrap_or(PI),
            count: st.theta_count.unwrap_or(61),
        }
    } else if command == Command::Figure(Figure::Fig6) {
        ThetaChoice::Range {
            min: 0.0,
            max: PI,
            count: 61,
        }
    } else {
        ThetaChoice::Single(PI / 3.0)
    };

    let n = &user.numeric;
    let (default_t_max, default_t_count) = match command {
        Command::Markovianity => (10.0, 2000),
        Command::DiffusionMap | Command::Figure(Figure::Fig1 | Figure::Fig3) => (3.0, 200),
        _ => (3.0, 301),
    };
    let defaults = QuadratureSpec::default();
    let quadrature = QuadratureSpec {
        relative_tolerance: n.relative_tolerance.unwrap_or(defaults.relative_tolerance),
        absolute_tolerance: n.absolute_tolerance.unwrap_or(defaults.absolute_tolerance),
        max_subdivisions: n.max_subdivisions.unwrap_or(defaults.max_subdivisions),
    };

    let format = user.output.format.unwrap_or(Format::Csv);
    let path = user
        .output
        .path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", command.name(), format.extension())));
    let plot_script = user.output.plot_script.unwrap_or(false);

    let sets = (command == Command::Figure(Figure::Fig7)).then(|| fig7_sets(&params, env));

    let cfg = RunConfig {
        command,
        kind,
        params,
        s,
        gamma0_values,
        theta,
        t_max: n.t_max.unwrap_or(default_t_max),
        t_count: n.t_count.unwrap_or(default_t_count),
        samples: n.samples.unwrap_or(2000),
        grid: n.grid.unwrap_or(match command {
            // γ₀ = 0.5 curves need the finer grid to pass the doubling check.
            Command::Figure(Figure::Fig7) => 8 * gpdephase_core::gp::DEFAULT_GRID,
            _ => gpdephase_core::gp::DEFAULT_GRID,
        }),
        quadrature,
        output: OutputConfig {
            path,
            format,
            plot_script,
        },
        sets,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn default_s_range(command: Command) -> (Option<f64>, f64, usize) {
    match command {
        Command::GpSweep | Command::Figure(Figure::Fig5) => (Some(-0.9), 4.0, 40),
        Command::Figure(Figure::Fig7) => (Some(-0.9), 4.0, 50),
        _ => (None, 5.0, 200),
    }
}

fn default_s(command: Command, kind: EnvKind, theta_sweep: bool) -> SChoice {
    let range = |c: Command| {
        let (min, max, count) = default_s_range(c);
        SChoice::Range { min, max, count }
    };
    match command {
        Command::Decoherence => match kind {
            EnvKind::Thermal => SChoice::Values(vec![1.0, 4.0]),
            EnvKind::NonEquilibrium => SChoice::Values(vec![1.0, 2.0, 3.0]),
        },
        Command::Figure(Figure::Fig2) => SChoice::Values(vec![1.0, 4.0]),
        Command::Figure(Figure::Fig4) => SChoice::Values(vec![1.0, 2.0, 3.0]),
        Command::Figure(Figure::Fig6) => SChoice::Values(vec![1.0, 2.0, 2.5, 3.0]),
        Command::GpSweep if theta_sweep => SChoice::Values(vec![1.0, 2.0, 2.5, 3.0]),
        Command::Markovianity | Command::Gp => SChoice::Values(vec![1.0]),
        other => range(other),
    }
}

/// The six curves of the non-equilibrium comparison figure: (γ₀, Λ) pairs at
/// λ = 0.5, d = 1, plus one curve with λ and d interchanged.
fn fig7_sets(base: &EnvParams, env: &EnvironmentSection) -> Vec<EnvParams> {
    let lambda = env.lambda.unwrap_or(0.5);
    let d = env.d.unwrap_or(1.0);
    let set = |gamma0: f64, cutoff: f64, lambda: f64, d: f64| EnvParams {
        gamma0,
        cutoff,
        lambda,
        d,
        ..*base
    };
    vec![
        set(0.5, 10.0, lambda, d),
        set(0.5, 5.0, lambda, d),
        set(0.1, 5.0, lambda, d),
        set(0.1, 1.0, lambda, d),
        set(0.1, 1.0, d, lambda),
        set(0.01, 10.0, lambda, d),
    ]
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let p = &cfg.params;
    let check = |ok: bool, name: &str, msg: String| if ok { Ok(()) } else { Err(field(name, msg)) };
    check(
        p.gamma0.is_finite() && p.gamma0 >= 0.0,
        "environment.gamma0",
        format!("must be >= 0, got {}", p.gamma0),
    )?;
    if let Some(v) = &cfg.gamma0_values {
        check(
            !v.is_empty(),
            "environment.gamma0_values",
            "must not be empty".into(),
        )?;
        for g in v {
            check(
                g.is_finite() && *g >= 0.0,
                "environment.gamma0_values",
                format!("must be >= 0, got {g}"),
            )?;
        }
    }
    check(
        p.cutoff.is_finite() && p.cutoff > 0.0,
        "environment.cutoff",
        format!("must be > 0, got {}", p.cutoff),
    )?;
    check(
        p.temperature.is_finite() && p.temperature >= 0.0,
        "environment.temperature",
        format!("must be >= 0, got {}", p.temperature),
    )?;
    check(
        p.lambda.is_finite(),
        "environment.lambda",
        format!("must be finite, got {}", p.lambda),
    )?;
    check(
        p.d.is_finite() && p.d > 0.0,
        "environment.d",
        format!("must be > 0, got {}", p.d),
    )?;

    let s_ok = |s: f64| s.is_finite() && s > -1.0;
    match &cfg.s {
        SChoice::Values(v) => {
            check(
                !v.is_empty(),
                "environment.s_values",
                "must not be empty".into(),
            )?;
            for &s in v {
                check(
                    s_ok(s),
                    "environment.s",
                    format!("s > -1 required, got {s}"),
                )?;
            }
            if cfg.command == Command::Gp {
                check(
                    v.len() == 1,
                    "environment.s",
                    "gp evaluates a single s".into(),
                )?;
            }
        }
        SChoice::Range { min, max, count } => {
            if cfg.command == Command::Gp {
                return Err(field("environment.s_min", "gp evaluates a single s"));
            }
            if let Some(m) = min {
                check(
                    s_ok(*m),
                    "environment.s_min",
                    format!("s > -1 required, got {m}"),
                )?;
                check(
                    m < max,
                    "environment.s_max",
                    format!("must exceed s_min ({m}), got {max}"),
                )?;
            }
            check(
                max.is_finite() && *max > 0.0,
                "environment.s_max",
                format!("must be > 0, got {max}"),
            )?;
            check(
                *count >= 2,
                "environment.s_count",
                format!("must be >= 2, got {count}"),
            )?;
        }
    }

    let theta_ok = |t: f64| (0.0..=PI).contains(&t);
    match cfg.theta {
        ThetaChoice::Single(t) => check(
            theta_ok(t),
            "state.theta",
            format!("must lie in [0, π], got {t}"),
        )?,
        ThetaChoice::Range { min, max, count } => {
            if cfg.command == Command::Gp {
                return Err(field("state.theta_min", "gp evaluates a single theta"));
            }
            check(
                theta_ok(min),
                "state.theta_min",
                format!("must lie in [0, π], got {min}"),
            )?;
            check(
                theta_ok(max) && max > min,
                "state.theta_max",
                format!("must lie in (theta_min, π], got {max}"),
            )?;
            check(
                count >= 2,
                "state.theta_count",
                format!("must be >= 2, got {count}"),
            )?;
        }
    }

    check(
        cfg.t_max.is_finite() && cfg.t_max > 0.0,
        "numeric.t_max",
        format!("must be > 0, got {}", cfg.t_max),
    )?;
    check(
        cfg.t_count >= 2,
        "numeric.t_count",
        format!("must be >= 2, got {}", cfg.t_count),
    )?;
    check(
        cfg.samples >= 16,
        "numeric.samples",
        format!("must be >= 16, got {}", cfg.samples),
    )?;
    check(
        cfg.grid >= gpdephase_core::gp::MIN_GRID,
        "numeric.grid",
        format!("must be >= 64, got {}", cfg.grid),
    )?;
    let q = &cfg.quadrature;
    check(
        q.relative_tolerance > 0.0 && q.relative_tolerance.is_finite(),
        "numeric.relative_tolerance",
        format!("must be > 0, got {}", q.relative_tolerance),
    )?;
    check(
        q.absolute_tolerance > 0.0 && q.absolute_tolerance.is_finite(),
        "numeric.absolute_tolerance",
        format!("must be > 0, got {}", q.absolute_tolerance),
    )?;
    check(
        q.max_subdivisions >= 1,
        "numeric.max_subdivisions",
        "must be >= 1".into(),
    )?;

    if cfg.output.plot_script && cfg.output.format == Format::Json {
        return Err(field(
            "output.plot_script",
            "plot scripts read CSV tables; use --format csv",
        ));
    }
    Ok(())
}
