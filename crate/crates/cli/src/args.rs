//! Command-line interface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    Command, EnvironmentSection, Figure, Format, NumericSection, OutputSection, PartialConfig,
    StateSection,
};

#[derive(Debug, Parser)]
#[command(
    name = "gpdephase",
    version,
    about = "Geometric phase of a dephasing qubit in structured environments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,
}

#[derive(Debug, Subcommand)]
pub enum CommandArg {
    /// Decoherence factor F(t) for one or more s.
    Decoherence(Flags),
    /// Diffusion coefficient D(t) over an (s, t) grid.
    DiffusionMap(Flags),
    /// Intervals of negative D(t) for each s.
    Markovianity(Flags),
    /// Geometric phase at a single parameter point.
    Gp(Flags),
    /// Geometric phase over s (and gamma0), or over theta with --theta-min/--theta-max/--theta-count.
    GpSweep(Flags),
    /// Reproduce a figure's data with its preset parameters.
    Figure {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        flags: Flags,
    },
}

impl CommandArg {
    pub fn split(self) -> (Command, Flags) {
        match self {
            CommandArg::Decoherence(f) => (Command::Decoherence, f),
            CommandArg::DiffusionMap(f) => (Command::DiffusionMap, f),
            CommandArg::Markovianity(f) => (Command::Markovianity, f),
            CommandArg::Gp(f) => (Command::Gp, f),
            CommandArg::GpSweep(f) => (Command::GpSweep, f),
            CommandArg::Figure { figure, flags } => (Command::Figure(figure), flags),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML configuration file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write a gnuplot script next to the CSV table.
    #[arg(long)]
    pub plot_script: bool,

    /// Environment: thermal or noneq.
    #[arg(long = "env", value_name = "KIND")]
    pub kind: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma0: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma0_values: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub s_count: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub s_values: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub cutoff: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub temperature: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Use exp(-F) rather than the rebased exp(-F) - 1 decoherence (noneq only).
    #[arg(long)]
    pub raw: bool,

    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub theta_count: Option<usize>,

    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_count: Option<usize>,
    /// Time samples for the markovianity scan.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Time steps per period for the geometric phase.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
}

impl Flags {
    pub fn to_partial(&self) -> PartialConfig {
        PartialConfig {
            environment: EnvironmentSection {
                kind: self.kind.clone(),
                gamma0: self.gamma0,
                gamma0_values: self.gamma0_values.clone(),
                s: self.s,
                s_min: self.s_min,
                s_max: self.s_max,
                s_count: self.s_count,
                s_values: self.s_values.clone(),
                cutoff: self.cutoff,
                temperature: self.temperature,
                lambda: self.lambda,
                d: self.d,
                mode: self.raw.then(|| "raw".to_string()),
            },
            state: StateSection {
                theta: self.theta,
                theta_min: self.theta_min,
                theta_max: self.theta_max,
                theta_count: self.theta_count,
            },
            numeric: NumericSection {
                t_max: self.t_max,
                t_count: self.t_count,
                samples: self.samples,
                grid: self.grid,
                relative_tolerance: self.rel_tol,
                absolute_tolerance: self.abs_tol,
                max_subdivisions: self.max_subdivisions,
            },
            output: OutputSection {
                path: self.out.clone(),
                format: self.format,
                plot_script: self.plot_script.then_some(true),
            },
        }
    }
}
