//! `barrier-rhs`: tables, transforms and verification runs for the
//! rectangular-barrier eigenfunction expansions.
//!
//! Exit status: 0 on success, 1 on a failed check or numerical failure,
//! 2 on a usage error (bad flags, bad config, inputs outside the domain).

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use barrier_rhs::testspace::FamilyDescriptor;
use barrier_rhs::verify::Check;
use barrier_rhs::{Channel, SignLabel};
use clap::{Parser, Subcommand, ValueEnum};

use config::{Grid, RunConfig, TransformBasis};

/// Invalid input detected before or while interpreting the request.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(name = "barrier-rhs", version, about = "Scattering tables, eigenfunction expansions and distributional checks for a 1D rectangular barrier")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Check threshold for `verify`; quadrature tolerance for the other commands.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Wave-number cutoff of energy and momentum integrals.
    #[arg(long, global = true)]
    kmax: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scattering coefficients on an energy grid (CSV).
    Coeffs {
        /// `a,b,c` or `start:stop:count`.
        #[arg(long)]
        energies: Option<String>,
    },
    /// One energy eigenfunction sampled on an x grid (CSV).
    Eigfun {
        #[arg(long)]
        energy: Option<f64>,
        #[arg(long, value_parser = parse_channel)]
        channel: Option<Channel>,
        #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
        sign: Option<SignLabel>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Energy or momentum amplitudes of a packet (CSV).
    Transform {
        /// `center,width,momentum[,degree]`.
        #[arg(long, allow_hyphen_values = true)]
        packet: Option<String>,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Synthesis of a packet from its amplitudes, compared with the packet (CSV).
    Reconstruct {
        #[arg(long, allow_hyphen_values = true)]
        packet: Option<String>,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Probability that a normalized packet has energy in a window (JSON).
    Probe {
        #[arg(long, allow_hyphen_values = true)]
        packet: Option<String>,
        #[arg(long)]
        e_lo: Option<f64>,
        #[arg(long)]
        e_hi: Option<f64>,
        #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
        sign: Option<SignLabel>,
    },
    /// Runs the verification suite (JSON); exit 1 if any check fails.
    Verify {
        /// Restricts the suite; repeatable.
        #[arg(long, value_enum)]
        check: Vec<CheckArg>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CheckArg {
    EigenEquation,
    EigenbraConjugation,
    DeltaNormalization,
    Commutators,
    Invariance,
}

impl From<CheckArg> for Check {
    fn from(c: CheckArg) -> Self {
        match c {
            CheckArg::EigenEquation => Check::EigenEquation,
            CheckArg::EigenbraConjugation => Check::EigenbraConjugation,
            CheckArg::DeltaNormalization => Check::DeltaNormalization,
            CheckArg::Commutators => Check::Commutators,
            CheckArg::Invariance => Check::Invariance,
        }
    }
}

fn parse_channel(s: &str) -> Result<Channel, String> {
    match s {
        "l" | "left" => Ok(Channel::Left),
        "r" | "right" => Ok(Channel::Right),
        _ => Err(format!("unknown channel {s:?}; use l or r")),
    }
}

fn parse_sign(s: &str) -> Result<SignLabel, String> {
    match s {
        "+" | "plus" => Ok(SignLabel::Plus),
        "-" | "minus" => Ok(SignLabel::Minus),
        _ => Err(format!("unknown sign {s:?}; use + or -")),
    }
}

fn parse_packet(s: &str) -> Result<FamilyDescriptor, UsageError> {
    let bad = || UsageError(format!("cannot parse packet {s:?}; use center,width,momentum[,degree]"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let real = |i: usize| parts[i].parse::<f64>().map_err(|_| bad());
    match parts.len() {
        3 => Ok(FamilyDescriptor::packet(real(0)?, real(1)?, real(2)?, 0)),
        4 => Ok(FamilyDescriptor::packet(
            real(0)?,
            real(1)?,
            real(2)?,
            parts[3].parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn grid_or(flag: Option<String>, fallback: &Grid) -> Result<Grid, UsageError> {
    flag.map_or_else(|| Ok(fallback.clone()), |s| Grid::parse(&s))
}

/// Whether the command produced output that reports a failed check.
enum Outcome {
    Done,
    ChecksFailed(Vec<String>),
}

fn run(cli: Cli) -> Result<Outcome> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(k) = cli.kmax {
        cfg.quadrature.k_max = k;
    }
    let is_verify = matches!(cli.command, Command::Verify { .. });
    if let (Some(t), false) = (cli.tol, is_verify) {
        cfg.quadrature.abs_tol = t;
        cfg.quadrature.rel_tol = t;
    }
    cfg.quadrature.validate().map_err(|e| UsageError(e.to_string()))?;
    let (model, spec) = (cfg.model, cfg.quadrature);
    let out = cli.out.as_deref();

    let bytes = match cli.command {
        Command::Coeffs { energies } => {
            let grid = grid_or(energies, &cfg.coeffs.energies)?;
            commands::coeffs(&model, &grid)?
        }
        Command::Eigfun { energy, channel, sign, x } => {
            let c = &cfg.eigfun;
            commands::eigfun(
                &model,
                energy.unwrap_or(c.energy),
                channel.unwrap_or(c.channel),
                sign.unwrap_or(c.sign),
                &grid_or(x, &c.x)?,
            )?
        }
        Command::Transform { packet, basis, grid } => {
            let c = &cfg.transform;
            let packet = packet.map_or(Ok(c.packet), |p| parse_packet(&p))?;
            let basis = basis.map_or(Ok(c.basis), |b| TransformBasis::parse(&b))?;
            commands::transform(&model, &spec, &packet, basis, &grid_or(grid, &c.grid)?)?
        }
        Command::Reconstruct { packet, basis, x } => {
            let c = &cfg.reconstruct;
            let packet = packet.map_or(Ok(c.packet), |p| parse_packet(&p))?;
            let basis = basis.map_or(Ok(c.basis), |b| TransformBasis::parse(&b))?;
            commands::reconstruct(&model, &spec, &packet, basis, &grid_or(x, &c.x)?)?
        }
        Command::Probe { packet, e_lo, e_hi, sign } => {
            let c = &cfg.probe;
            let packet = packet.map_or(Ok(c.packet), |p| parse_packet(&p))?;
            commands::probe(
                &model,
                &spec,
                &packet,
                e_lo.unwrap_or(c.e_lo),
                e_hi.or(c.e_hi),
                sign.unwrap_or(c.sign),
            )?
        }
        Command::Verify { check } => {
            let checks: Vec<Check> = if check.is_empty() {
                cfg.verify.checks.clone()
            } else {
                check.into_iter().map(Check::from).collect()
            };
            if checks.is_empty() {
                return Err(UsageError("the verify suite selection is empty".into()).into());
            }
            let (bytes, reports) = commands::verify(&model, &spec, &checks, cli.tol)?;
            output::emit(&bytes, out)?;
            let failed: Vec<String> = reports.into_iter().filter(|r| !r.passed).map(|r| r.check_name).collect();
            return Ok(if failed.is_empty() {
                Outcome::Done
            } else {
                Outcome::ChecksFailed(failed)
            });
        }
    };
    output::emit(&bytes, out)?;
    Ok(Outcome::Done)
}

fn is_usage(err: &anyhow::Error) -> bool {
    if err.downcast_ref::<UsageError>().is_some() {
        return true;
    }
    matches!(
        err.downcast_ref::<barrier_rhs::Error>(),
        Some(barrier_rhs::Error::Domain(_) | barrier_rhs::Error::Capability(_))
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed(names)) => {
            eprintln!("{} check(s) failed:", names.len());
            for n in names {
                eprintln!("  {n}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}
