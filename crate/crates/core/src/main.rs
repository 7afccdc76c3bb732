use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use oseen_cutfem::harness::parse::{parse_config_str, parse_eps_list, parse_f64_list, parse_usize_list, parse_zeta};
use oseen_cutfem::harness::{output, parse_mode, parse_regime, run_and_write, Study, StudySpec};
use oseen_cutfem::Result;

/// Cut finite element Oseen solver with Navier slip boundary conditions,
/// run on the rotating box-flow benchmark.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single solve (first entry of each list)
    Run(Flags),
    /// Mesh refinement study with observed rates
    Converge(Flags),
    /// Sweep over 1/γ
    SweepGamma(Flags),
    /// Sweep over slip lengths
    SweepEps(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// `key = value` file; command-line flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// polynomial order (1 or 2)
    #[arg(long)]
    order: Option<usize>,
    /// elements per side of the background mesh, comma-separated
    #[arg(long)]
    n: Option<String>,
    /// mesh rotation in radians
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// slip lengths, comma-separated; `inf` for perfect slip
    #[arg(long)]
    eps: Option<String>,
    /// values of 1/γ used for both Nitsche parameters, comma-separated
    #[arg(long)]
    inv_gamma: Option<String>,
    /// sign of the adjoint-consistency terms (+1 or -1)
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<String>,
    /// nitsche or substitution
    #[arg(long)]
    mode: Option<String>,
    /// experimental or analysis
    #[arg(long)]
    regime: Option<String>,
    /// CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG log-log plot path
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn build_spec(study: Study, f: &Flags) -> Result<StudySpec> {
    let mut spec = StudySpec::new(study);
    if let Some(path) = &f.config {
        let text = std::fs::read_to_string(path)?;
        spec.apply_config(&parse_config_str(&text)?)?;
    }
    // the subcommand decides the study even if the file names one
    spec.study = study;
    if let Some(v) = f.order {
        spec.order = v;
    }
    if let Some(v) = &f.n {
        spec.ns = parse_usize_list(v)?;
    }
    if let Some(v) = f.theta {
        spec.theta = v;
    }
    if let Some(v) = &f.eps {
        spec.eps = parse_eps_list(v)?;
    }
    if let Some(v) = &f.inv_gamma {
        spec.inv_gamma = parse_f64_list(v)?;
    }
    if let Some(v) = &f.zeta {
        spec.zeta = parse_zeta(v)?;
    }
    if let Some(v) = &f.mode {
        spec.mode = parse_mode(v)?;
    }
    if let Some(v) = &f.regime {
        spec.regime = parse_regime(v)?;
    }
    if f.out.is_some() {
        spec.out = f.out.clone();
    }
    if f.svg.is_some() {
        spec.svg = f.svg.clone();
    }
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<()> {
    let (study, flags) = match &cli.command {
        Command::Run(f) => (Study::Single, f),
        Command::Converge(f) => (Study::Converge, f),
        Command::SweepGamma(f) => (Study::SweepGamma, f),
        Command::SweepEps(f) => (Study::SweepEps, f),
    };
    let spec = build_spec(study, flags)?;
    let out = run_and_write(&spec)?;
    if spec.out.is_none() {
        output::write_csv(std::io::stdout().lock(), &out)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
