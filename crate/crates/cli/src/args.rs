use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Estimation of intrinsic-decoherence parameters (Milburn dephasing and Gisin dissipation).
#[derive(Debug, Parser)]
#[command(name = "idm", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time evolution: Bloch components (qubit) or Fock populations (oscillator).
    Evolve(Common),
    /// Quantum Fisher information, QSNR and Cramér–Rao bound.
    Qfi(Common),
    /// Fisher information of a spin measurement on the qubit.
    Fi(Common),
    /// QSNR over a grid of scaling variables.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Grid axis `name=lo:hi:points[:log]`; repeatable.
        #[arg(long = "axis")]
        axes: Vec<String>,
        /// Explicit axis values `name=v1,v2,...`; repeatable.
        #[arg(long = "values")]
        values: Vec<String>,
    },
    /// Locate optimal estimation conditions.
    Optimize {
        target: OptimizeTarget,
        #[command(flatten)]
        common: Common,
        /// `|alpha|` grid for fit-g, comma separated.
        #[arg(long)]
        alphas: Option<String>,
    },
    /// Simulate the iterative estimation protocol.
    Iterate(Common),
    /// Regenerate the data behind a published exhibit together with a checks file.
    Reproduce {
        target: ReproduceTarget,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizeTarget {
    MidQubit,
    GndQubit,
    MidOscillator,
    GndOscillator,
    FitG,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReproduceTarget {
    Table1,
    Fig1,
    Fig2,
    GndFig,
}

/// Run parameters. Every flag has a config-file key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Key-value config file (`schema = 1`); flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// mid | gnd
    #[arg(long)]
    pub model: Option<String>,
    /// qubit | oscillator
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// `lo:hi:points[:log]`
    #[arg(long = "t-grid")]
    pub t_grid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Coherent amplitude `re` or `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub dim: Option<String>,
    /// `mu omega^2 t` (MID).
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Scaling variable: `mu omega^2 t` (MID) or `gamma omega t` (GND).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long = "measure-theta", allow_hyphen_values = true)]
    pub measure_theta: Option<String>,
    #[arg(long = "measure-phi", allow_hyphen_values = true)]
    pub measure_phi: Option<String>,
    /// Repetitions per estimate (or per round).
    #[arg(long = "M")]
    pub shots: Option<String>,
    #[arg(long)]
    pub rounds: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Initial guess for `iterate`.
    #[arg(long, allow_hyphen_values = true)]
    pub guess: Option<String>,
    /// Output file (directory for `reproduce`); stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
}

impl Common {
    /// `(key, flag value)` pairs in config-file spelling.
    pub fn flag_entries(&self) -> Vec<(&'static str, Option<String>)> {
        vec![
            ("model", self.model.clone()),
            ("system", self.system.clone()),
            ("omega", self.omega.clone()),
            ("mu", self.mu.clone()),
            ("gamma", self.gamma.clone()),
            ("t", self.t.clone()),
            ("t-grid", self.t_grid.clone()),
            ("theta", self.theta.clone()),
            ("phi", self.phi.clone()),
            ("alpha", self.alpha.clone()),
            ("dim", self.dim.clone()),
            ("c", self.c.clone()),
            ("x", self.x.clone()),
            ("measure-theta", self.measure_theta.clone()),
            ("measure-phi", self.measure_phi.clone()),
            ("M", self.shots.clone()),
            ("rounds", self.rounds.clone()),
            ("seed", self.seed.clone()),
            ("guess", self.guess.clone()),
            ("out", self.out.as_ref().map(|p| p.display().to_string())),
            ("format", self.format.clone()),
        ]
    }
}
