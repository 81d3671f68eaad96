use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use clap::Args;
use oscmap::io::{analog_rows, tunnel_rows, write_csv_file, write_json_file, AnalogRow, TunnelRow};
use oscmap::ode_oracle::{ExtractOptions, Span, Tolerance};
use oscmap::tdho_core::NondimScales;
use oscmap::tunneling::{
    classical_analog, synthesize, verify_design, BarrierDesign, DesignSpec, DEFAULT_DOMAIN,
    DEFAULT_DX, PRESETS,
};
use oscmap::Grid;
use serde::{Deserialize, Serialize};

use crate::config::{output_path, Format};
use crate::error::CliError;
use crate::layered;

pub const R_TOLERANCE: f64 = 1e-3;
pub const PHASE_TOLERANCE: f64 = 1e-2;

/// Synthesize a barrier with prescribed reflection and transmission phase.
#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TunnelArgs {
    /// example1, example2 or example3; other flags override its fields.
    #[arg(long)]
    pub preset: Option<String>,
    /// Target reflection probability.
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: Option<f64>,
    /// Target transmission phase shift (rad).
    #[arg(long, allow_negative_numbers = true)]
    pub dtheta: Option<f64>,
    /// Width of the reflection profile.
    #[arg(long)]
    pub d: Option<f64>,
    /// Width of the phase-shift step.
    #[arg(long = "D")]
    #[serde(rename = "D")]
    pub big_d: Option<f64>,
    /// Additive σ perturbation η(x), as an expression in x.
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long)]
    pub amp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x1: Option<f64>,
    #[arg(long)]
    pub dx: Option<f64>,
    /// Measure R and Δθ of the synthesized barrier with the integration oracle.
    #[arg(long)]
    #[serde(default)]
    pub verify: bool,
    /// Scattering report path (default: <output stem>.scattering.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the classical-analog table (unit scales) to this path.
    #[arg(long)]
    pub analog: Option<PathBuf>,
    /// Relative tolerance of the oracle integration.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

layered!(TunnelArgs; options: [preset, r, dtheta, d, big_d, eta, amp, theta0, x0, x1, dx, report, analog, tol, output, format]; switches: [verify]);

#[derive(Serialize)]
struct TunnelDocument<'a> {
    design: DesignSpec,
    samples: Vec<TunnelRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analog: Option<&'a [AnalogRow]>,
}

fn design_spec(args: &TunnelArgs) -> Result<DesignSpec, CliError> {
    let mut spec = match &args.preset {
        Some(name) => BarrierDesign::preset(name)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "unknown preset '{name}' (expected one of {})",
                    PRESETS.join(", ")
                ))
            })?
            .spec(),
        None => DesignSpec::default(),
    };
    if let Some(v) = args.r {
        spec.r = v;
    }
    if let Some(v) = args.dtheta {
        spec.delta_theta = v;
    }
    if let Some(v) = args.d {
        spec.d = v;
    }
    if let Some(v) = args.big_d {
        spec.big_d = v;
    }
    if let Some(v) = &args.eta {
        spec.eta_expr = Some(v.clone());
    }
    if let Some(v) = args.amp {
        spec.amp = v;
    }
    if let Some(v) = args.theta0 {
        spec.theta0 = v;
    }
    Ok(spec)
}

fn angle_gap(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(TAU) - PI
}

pub fn run(args: TunnelArgs) -> Result<(), CliError> {
    let format = args.format.unwrap_or(Format::Csv);
    let spec = design_spec(&args)?;
    let design = BarrierDesign::new(&spec)?;
    let (x0, x1) = (
        args.x0.unwrap_or(DEFAULT_DOMAIN.0),
        args.x1.unwrap_or(DEFAULT_DOMAIN.1),
    );
    let grid = Grid::new(x0, x1, args.dx.unwrap_or(DEFAULT_DX))
        .map_err(|e| CliError::usage(e.to_string()))?;
    let sol = synthesize(&design, grid)?;

    println!(
        "design          R = {}, Δθ = {}, d = {}, D = {}, η = {}",
        spec.r,
        spec.delta_theta,
        spec.d,
        spec.big_d,
        spec.eta_expr.as_deref().unwrap_or("0")
    );
    println!("σ₀              {:.6}", design.sigma0);
    println!("flux |A|²(1−R)  {:.6}", design.flux());
    let u_max = sol.u_bar.iter().fold(f64::MIN, |m, u| m.max(*u));
    let u_min = sol.u_bar.iter().fold(f64::MAX, |m, u| m.min(*u));
    println!("ū range         [{u_min:.6}, {u_max:.6}]");
    println!("TISE residual   {:.3e}", sol.tise_residual);
    println!("flux deviation  {:.3e}", sol.flux_deviation());

    let analog: Option<Vec<AnalogRow>> = args
        .analog
        .as_ref()
        .map(|_| analog_rows(&classical_analog(&sol, NondimScales::unit())).collect());

    let path = output_path(&args.output, format, "tunnel");
    match format {
        Format::Csv => write_csv_file(&path, tunnel_rows(&sol))?,
        Format::Json => write_json_file(
            &path,
            &TunnelDocument {
                design: spec.clone(),
                samples: tunnel_rows(&sol).collect(),
                analog: analog.as_deref(),
            },
        )?,
    }
    println!("wrote {}", path.display());
    if let (Some(p), Some(rows)) = (&args.analog, &analog) {
        write_csv_file(p, rows)?;
        println!("wrote {}", p.display());
    }

    if !args.verify {
        return Ok(());
    }
    let tol = Tolerance::new(args.tol.unwrap_or(1e-10), 1e-12);
    let rep = match verify_design(&design, Span::new(x0, x1), tol, &ExtractOptions::default()) {
        Ok(r) => r,
        Err(e) => return Err(CliError::TunnelMiss(format!("extraction failed: {e}"))),
    };
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| path.with_extension("scattering.json"));
    write_json_file(&report_path, &rep)?;
    let r_err = (rep.r_extracted - spec.r).abs();
    let phase_err = angle_gap(rep.phase_shift_extracted, spec.delta_theta).abs();
    println!(
        "extracted R     {:.6} (target {}, |Δ| {r_err:.2e})",
        rep.r_extracted, spec.r
    );
    println!(
        "extracted Δθ    {:+.6} (target {}, |Δ| {phase_err:.2e})",
        rep.phase_shift_extracted, spec.delta_theta
    );
    println!("fit residual    {:.2e}", rep.fit_residual);
    println!("edge |ū|        {:.2e}", rep.edge_potential);
    println!("Wronskian drift {:.2e}", rep.wronskian_drift);
    println!("wrote {}", report_path.display());
    if r_err > R_TOLERANCE || phase_err > PHASE_TOLERANCE {
        return Err(CliError::TunnelMiss(format!(
            "design missed: |ΔR| = {r_err:.2e} (limit {R_TOLERANCE:e}), |Δθ error| = {phase_err:.2e} (limit {PHASE_TOLERANCE:e})"
        )));
    }
    println!("design verified");
    Ok(())
}
