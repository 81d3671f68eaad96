use std::path::PathBuf;

use clap::Args;
use oscmap::io::{cell_rows, summary_rows, write_csv_file, write_json_file};
use oscmap::range_relations::{run_experiment, OscillatorParams, TGrid, Theta0Grid, WindowSpec};
use serde::Deserialize;

use crate::config::{output_path, Format};
use crate::error::CliError;
use crate::layered;

/// Averaged energy–time and position–momentum range products over θ₀.
#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RangeArgs {
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub rho0: Option<f64>,
    /// θ₀ grid spacing in degrees.
    #[arg(long)]
    pub theta0_step: Option<f64>,
    #[arg(long = "T-lo-mult")]
    #[serde(rename = "T-lo-mult")]
    pub t_lo_mult: Option<f64>,
    #[arg(long = "T-hi-mult")]
    #[serde(rename = "T-hi-mult")]
    pub t_hi_mult: Option<f64>,
    #[arg(long = "T-step-mult")]
    #[serde(rename = "T-step-mult")]
    pub t_step_mult: Option<f64>,
    /// Window half-width in units of T.
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long = "steps-per-T")]
    #[serde(rename = "steps-per-T")]
    pub steps_per_t: Option<usize>,
    /// Per-T summary path (CSV format only).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Per-cell results (CSV), or the whole result (JSON).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

layered!(RangeArgs; options: [omega0, a, mass, rho0, theta0_step, t_lo_mult, t_hi_mult, t_step_mult, half_width, steps_per_t, summary, output, format]; switches: []);

pub fn run(args: RangeArgs) -> Result<(), CliError> {
    let format = args.format.unwrap_or(Format::Csv);
    let d = OscillatorParams::default();
    let params = OscillatorParams {
        omega0: args.omega0.unwrap_or(d.omega0),
        a: args.a.unwrap_or(d.a),
        mass: args.mass.unwrap_or(d.mass),
        rho0: args.rho0.unwrap_or(d.rho0),
    };
    let theta0_grid = match args.theta0_step {
        Some(deg) => Theta0Grid::from_degrees(deg),
        None => Theta0Grid::default(),
    };
    let dt = TGrid::default();
    let t_grid = TGrid {
        lo_mult: args.t_lo_mult.unwrap_or(dt.lo_mult),
        hi_mult: args.t_hi_mult.unwrap_or(dt.hi_mult),
        step_mult: args.t_step_mult.unwrap_or(dt.step_mult),
    };
    let dw = WindowSpec::default();
    let window = WindowSpec {
        half_width: args.half_width.unwrap_or(dw.half_width),
        steps_per_t: args.steps_per_t.unwrap_or(dw.steps_per_t),
    };
    let res = run_experiment(params, theta0_grid, t_grid, window)?;

    match format {
        Format::Csv => {
            let cells = output_path(&args.output, format, "range_cells");
            let summary = args
                .summary
                .clone()
                .unwrap_or_else(|| PathBuf::from("range_summary.csv"));
            write_csv_file(&cells, cell_rows(&res))?;
            write_csv_file(&summary, summary_rows(&res))?;
            println!("wrote {} and {}", cells.display(), summary.display());
        }
        Format::Json => {
            if args.summary.is_some() {
                return Err(CliError::usage("--summary applies to CSV output only"));
            }
            let path = output_path(&args.output, format, "range");
            write_json_file(&path, &res)?;
            println!("wrote {}", path.display());
        }
    }

    println!(
        "L = {:.6e} J·s, T_min = {:.9} s, {} θ₀ × {} T",
        res.invariant,
        res.t_min,
        res.theta0_values.len(),
        res.t_values.len()
    );
    println!(
        "{:>10} {:>12} {:>12} {:>14} {:>14}",
        "T/T_min", "2/L·ΔE·T", "2/L·ΔX·ΔP", "min cell ΔE·T", "min cell ΔXΔP"
    );
    for s in &res.summary {
        println!(
            "{:>10.3} {:>12.5} {:>12.5} {:>14.5} {:>14.5}",
            s.t_mult,
            s.norm_energy_product,
            s.norm_xp_product,
            s.min_cell_energy_product,
            s.min_cell_xp_product
        );
    }
    println!("max L drift {:.2e}", res.max_l_drift());
    let failing: Vec<String> = res
        .summary
        .iter()
        .filter(|s| !s.inequalities_hold())
        .map(|s| format!("{:.3}", s.t_mult))
        .collect();
    if failing.is_empty() {
        println!("both averaged range inequalities hold at every T");
        Ok(())
    } else {
        Err(CliError::RangeFailed(format!(
            "averaged range inequality fails at T/T_min = {}",
            failing.join(", ")
        )))
    }
}
