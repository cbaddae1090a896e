//! `netkit`: linear network analysis from the command line.
//!
//! Exit status is 0 on success, 1 on usage, input or analysis errors and 2
//! when a requested check reports violations.

mod commands;
mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netkit::Tolerance;

#[derive(Parser, Debug)]
#[command(name = "netkit", version, about = "Admittance-matrix analysis of linear electrical networks")]
struct Cli {
    /// Scalar arithmetic: complex doubles or exact complex rationals.
    #[arg(long, value_enum, default_value_t = Mode::Float64, global = true)]
    mode: Mode,
    /// Shorthand for `--mode exact`.
    #[arg(long, global = true)]
    exact: bool,
    /// Angular frequency for (g, c, r, l) branches; overrides the file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    omega: Option<String>,
    /// Real part of the complex frequency; overrides the file.
    #[arg(long, global = true, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Relative tolerance for float comparisons (default 1e-9, or
    /// NETKIT_TOLERANCE when set).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float64,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct FileArg {
    /// Netlist file, or `-` for standard input.
    pub file: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    A,
    B,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Parse a netlist and print its normalised form.
    Parse {
        #[command(flatten)]
        input: FileArg,
    },
    /// Print the admittance matrix.
    Ymatrix {
        #[command(flatten)]
        input: FileArg,
    },
    /// Solve for node voltages under the sources in the file.
    Solve {
        #[command(flatten)]
        input: FileArg,
        /// Node held at zero volts (name or 1-based index; default the first node).
        #[arg(long)]
        ground: Option<String>,
    },
    /// Driving-point impedance between two nodes.
    Impedance {
        #[command(flatten)]
        input: FileArg,
        j: String,
        k: String,
    },
    /// Voltage between j and k per unit current injected at p and drawn from q.
    Transfer {
        #[command(flatten)]
        input: FileArg,
        p: String,
        q: String,
        j: String,
        k: String,
    },
    /// Kirchhoff characteristic (sum of spanning-tree admittance products).
    Kirchhoff {
        #[command(flatten)]
        input: FileArg,
        /// Also enumerate spanning trees and compare both routes.
        #[arg(long)]
        trees: bool,
    },
    /// Run identity and property checks; exits 2 on any violation.
    Check {
        #[command(flatten)]
        input: FileArg,
        #[arg(long)]
        foster: bool,
        #[arg(long)]
        jacobi: bool,
        #[arg(long)]
        tellegen: bool,
        /// Angles for the triangle-inequality scan, e.g. `0 pi/4 -pi/2`.
        #[arg(long, num_args = 1.., value_delimiter = ',', allow_hyphen_values = true)]
        metric: Vec<String>,
        #[arg(long)]
        structure: bool,
        /// Ground node for the Tellegen solve.
        #[arg(long)]
        ground: Option<String>,
    },
    /// Derivative of the impedance between j and k with respect to one branch admittance.
    Sensitivity {
        #[command(flatten)]
        input: FileArg,
        j: String,
        k: String,
        #[arg(long)]
        branch: String,
    },
    /// Apply one modification and compare predicted cofactors with direct ones.
    Modify {
        #[command(flatten)]
        input: FileArg,
        /// Identify two nodes.
        #[arg(long, num_args = 2, value_names = ["J", "K"])]
        contract: Option<Vec<String>>,
        /// Remove a branch by name.
        #[arg(long)]
        delete: Option<String>,
        /// Add a branch of admittance Y between J and K.
        #[arg(long, num_args = 3, value_names = ["J", "K", "Y"], allow_hyphen_values = true)]
        augment: Option<Vec<String>>,
        /// Attach a new node to K through admittance Y.
        #[arg(long, num_args = 2, value_names = ["K", "Y"], allow_hyphen_values = true)]
        expand: Option<Vec<String>>,
    },
    /// Replace one side of a port by its Norton equivalent, or eliminate a voltage source.
    Reduce {
        #[command(flatten)]
        input: FileArg,
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        port: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = SideArg::B)]
        side: SideArg,
        /// Name of a voltage source to eliminate.
        #[arg(long)]
        vsrc: Option<String>,
    },
    /// Positive-real tests on the impedance between j and k as a function of s.
    Prcheck {
        #[command(flatten)]
        input: FileArg,
        j: String,
        k: String,
    },
    /// Phase-angle assignment and power flow for an AC solution.
    Phase {
        #[command(flatten)]
        input: FileArg,
        #[arg(long)]
        ground: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Parse { .. } => "parse",
            Command::Ymatrix { .. } => "ymatrix",
            Command::Solve { .. } => "solve",
            Command::Impedance { .. } => "impedance",
            Command::Transfer { .. } => "transfer",
            Command::Kirchhoff { .. } => "kirchhoff",
            Command::Check { .. } => "check",
            Command::Sensitivity { .. } => "sensitivity",
            Command::Modify { .. } => "modify",
            Command::Reduce { .. } => "reduce",
            Command::Prcheck { .. } => "prcheck",
            Command::Phase { .. } => "phase",
        }
    }

    pub fn file(&self) -> &str {
        match self {
            Command::Parse { input }
            | Command::Ymatrix { input }
            | Command::Solve { input, .. }
            | Command::Impedance { input, .. }
            | Command::Transfer { input, .. }
            | Command::Kirchhoff { input, .. }
            | Command::Check { input, .. }
            | Command::Sensitivity { input, .. }
            | Command::Modify { input, .. }
            | Command::Reduce { input, .. }
            | Command::Prcheck { input, .. }
            | Command::Phase { input, .. } => &input.file,
        }
    }
}

const DEFAULT_TOLERANCE: f64 = 1e-9;

fn tolerance(flag: Option<f64>) -> Result<f64, String> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("NETKIT_TOLERANCE") {
        Ok(s) => s.trim().parse::<f64>().map_err(|_| format!("NETKIT_TOLERANCE is not a number: '{s}'")),
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let json = cli.json || cli.format == Format::Json;
    let rel = match tolerance(cli.tolerance) {
        Ok(t) if t >= 0.0 && t.is_finite() => t,
        Ok(t) => return fail(json, cli.command.name(), &format!("tolerance must be finite and nonnegative, got {t}")),
        Err(msg) => return fail(json, cli.command.name(), &msg),
    };
    let opts = commands::Options {
        mode: if cli.exact { Mode::Exact } else { cli.mode },
        omega: cli.omega,
        sigma: cli.sigma,
        tol: Tolerance::new(rel, rel * 1e-3),
    };
    match commands::run(&cli.command, &opts) {
        Ok(report) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("serialisable"));
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(msg) => fail(json, cli.command.name(), &msg),
    }
}

fn fail(json: bool, command: &str, msg: &str) -> ExitCode {
    if json {
        let mut r = render::Report::new(command);
        r.note(format!("error: {msg}"));
        r.result("error", msg);
        println!("{}", serde_json::to_string_pretty(&r.to_json()).expect("serialisable"));
    }
    eprintln!("error: {msg}");
    ExitCode::from(1)
}
