use std::path::PathBuf;

use clap::{Args, ValueEnum};
use oscmap::io::{write_csv_file, write_json_file, PairDocument};
use oscmap::jet_math::PhaseExpr;
use oscmap::range_relations::{OscillatorParams, PerturbationSpec};
use oscmap::tdho_core::generate_pair;
use oscmap::Grid;
use serde::Deserialize;

use crate::config::{output_path, Format};
use crate::error::CliError;
use crate::layered;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairPreset {
    /// θ₀ + ω₀t + a·exp(−t²/T²) with the reference oscillator constants.
    Gaussian,
}

/// Build an exact (Ω², x) pair from a phase function.
#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PairGenArgs {
    /// Phase expression θ(t); mutually exclusive with --preset.
    #[arg(long)]
    pub phase: Option<String>,
    /// Name of the independent variable in --phase.
    #[arg(long)]
    pub variable: Option<String>,
    #[arg(long, value_enum)]
    pub preset: Option<PairPreset>,
    /// L̃ = L/M; the gaussian preset derives it from --rho0 and --omega0.
    #[arg(long)]
    pub ltilde: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t_cap: Option<f64>,
    #[arg(long)]
    pub rho0: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

layered!(PairGenArgs; options: [phase, variable, preset, ltilde, mass, t0, t1, dt, theta0, omega0, a, t_cap, rho0, output, format]; switches: []);

fn explicit_grid(args: &PairGenArgs) -> Result<Option<Grid>, CliError> {
    match (args.t0, args.t1, args.dt) {
        (None, None, None) => Ok(None),
        (Some(t0), Some(t1), Some(dt)) => Ok(Some(
            Grid::new(t0, t1, dt).map_err(|e| CliError::usage(e.to_string()))?,
        )),
        _ => Err(CliError::usage(
            "--t0, --t1 and --dt must be given together",
        )),
    }
}

pub fn run(args: PairGenArgs) -> Result<(), CliError> {
    let format = args.format.unwrap_or(Format::Csv);
    let (phase, l_tilde, mass, grid) = match (&args.phase, args.preset) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "--phase and --preset are mutually exclusive",
            ))
        }
        (None, None) => return Err(CliError::usage("one of --phase or --preset is required")),
        (Some(text), None) => {
            for (flag, given) in [
                ("--theta0", args.theta0),
                ("--omega0", args.omega0),
                ("--a", args.a),
                ("--T", args.t_cap),
                ("--rho0", args.rho0),
            ] {
                if given.is_some() {
                    return Err(CliError::usage(format!(
                        "{flag} applies only to --preset gaussian"
                    )));
                }
            }
            let phase = PhaseExpr::parse(text, args.variable.as_deref().unwrap_or("t"))?;
            let grid = explicit_grid(&args)?
                .ok_or_else(|| CliError::usage("--t0, --t1 and --dt are required with --phase"))?;
            (
                phase,
                args.ltilde.unwrap_or(1.0),
                args.mass.unwrap_or(1.0),
                grid,
            )
        }
        (None, Some(PairPreset::Gaussian)) => {
            if args.ltilde.is_some() {
                return Err(CliError::usage(
                    "the gaussian preset derives L̃ from --rho0 and --omega0",
                ));
            }
            let d = OscillatorParams::default();
            let params = OscillatorParams {
                omega0: args.omega0.unwrap_or(d.omega0),
                a: args.a.unwrap_or(d.a),
                mass: args.mass.unwrap_or(d.mass),
                rho0: args.rho0.unwrap_or(d.rho0),
            };
            let t_cap = args.t_cap.unwrap_or(2.0 * params.t_min());
            let spec = PerturbationSpec::new(params, args.theta0.unwrap_or(0.0), t_cap)?;
            let grid = match explicit_grid(&args)? {
                Some(g) => g,
                None => spec.window(6.0, 4000)?,
            };
            (spec.phase(), params.l_tilde(), params.mass, grid)
        }
    };

    let pair = generate_pair(&phase, l_tilde, mass, grid)?;
    let report = pair.check_invariants()?;
    let path = output_path(&args.output, format, "pair");
    match format {
        Format::Csv => write_csv_file(&path, &pair.samples)?,
        Format::Json => write_json_file(&path, &PairDocument::from_pair(&pair))?,
    }
    println!("phase           {}", phase.to_text());
    println!(
        "samples         {} on [{}, {}]",
        pair.len(),
        pair.grid.t0,
        pair.grid.t1
    );
    println!("L̃, M            {l_tilde}, {mass}");
    println!("L drift         {:.3e}", report.l_drift);
    println!("ODE residual    {:.3e}", report.construction_residual);
    println!("TK consistency  {:.3e}", report.tk_consistency);
    println!("Ermakov-Pinney  {:.3e}", report.ermakov_pinney);
    println!("Wronskian drift {:.3e}", report.wronskian_drift);
    println!("wrote {}", path.display());
    Ok(())
}
