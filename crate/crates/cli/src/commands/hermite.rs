use std::path::PathBuf;

use clap::Args;
use oscmap::io::{hermite_rows, write_csv_file, write_json_file};
use oscmap::tdho_core::{hermite_pair, HermitePair, MAX_HERMITE_ORDER};
use oscmap::Grid;
use serde::Deserialize;

use crate::config::{output_path, Format};
use crate::error::CliError;
use crate::layered;

pub const RESIDUAL_LIMIT: f64 = 1e-8;
pub const NORM_LIMIT: f64 = 1e-6;

/// Tabulate the Hermite-function family ẍ + (2n+1−t²)x = 0 and check it.
#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct HermiteArgs {
    /// Highest order emitted (orders 0..=n-max).
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

layered!(HermiteArgs; options: [n_max, t0, t1, dt, output, format]; switches: []);

/// Max |ẍ + Ω²x| over the grid, relative to max |Ω²x|.
pub fn scaled_residual(h: &HermitePair, grid: &Grid) -> f64 {
    let (mut res, mut scale) = (0.0_f64, 0.0_f64);
    for t in grid.points() {
        let j = h.solution_jet(t);
        res = res.max((j.v2 + h.omega_sq(t) * j.v0).abs());
        scale = scale.max((h.omega_sq(t) * j.v0).abs());
    }
    if scale > 0.0 {
        res / scale
    } else {
        res
    }
}

/// ∫H² over [−12, 12] by composite Simpson with step 1e-3.
pub fn norm(h: &HermitePair) -> f64 {
    let n = 24_000;
    let step = 24.0 / n as f64;
    let f = |i: usize| h.solution(-12.0 + i as f64 * step).powi(2);
    let mut s = f(0) + f(n);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 * f(i) } else { 2.0 * f(i) };
    }
    s * step / 3.0
}

pub fn run(args: HermiteArgs) -> Result<(), CliError> {
    let format = args.format.unwrap_or(Format::Csv);
    let n_max = args.n_max.unwrap_or(5);
    if n_max > MAX_HERMITE_ORDER {
        return Err(CliError::usage(format!(
            "--n-max must not exceed {MAX_HERMITE_ORDER}"
        )));
    }
    let grid = Grid::new(
        args.t0.unwrap_or(-6.0),
        args.t1.unwrap_or(6.0),
        args.dt.unwrap_or(0.01),
    )
    .map_err(|e| CliError::usage(e.to_string()))?;
    let orders: Vec<HermitePair> = (0..=n_max).map(hermite_pair).collect::<Result<_, _>>()?;
    let rows = hermite_rows(&orders, grid);
    let path = output_path(&args.output, format, "hermite");
    match format {
        Format::Csv => write_csv_file(&path, &rows)?,
        Format::Json => write_json_file(&path, &rows)?,
    }
    println!("{:>3} {:>14} {:>14}", "n", "residual", "|∫H² − 1|");
    let mut ok = true;
    for h in &orders {
        let (res, norm_err) = (scaled_residual(h, &grid), (norm(h) - 1.0).abs());
        ok &= res < RESIDUAL_LIMIT && norm_err < NORM_LIMIT;
        println!("{:>3} {:>14.3e} {:>14.3e}", h.n, res, norm_err);
    }
    println!("wrote {}", path.display());
    if ok {
        Ok(())
    } else {
        Err(CliError::VerifyFailed(format!(
            "Hermite check exceeded residual {RESIDUAL_LIMIT:e} or normalization {NORM_LIMIT:e}"
        )))
    }
}
