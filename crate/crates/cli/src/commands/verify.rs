use std::path::{Path, PathBuf};

use clap::Args;
use num_complex::Complex64;
use oscmap::io::*;
use oscmap::jet_math::PhaseExpr;
use oscmap::ode_oracle::{
    integrate_tdhoe, integrate_tdhoe_complex, replay_pair, IntegrationResult, SampledCoefficient,
    Span, Tolerance,
};
use oscmap::tdho_core::{generate_pair, hermite_pair, OscillatorState};
use serde::Deserialize;

use crate::config::Format;
use crate::error::CliError;
use crate::layered;

/// Replay an emitted file through the integration oracle.
#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct VerifyArgs {
    /// File written by pair-gen, tunnel, range or hermite.
    pub input: Option<PathBuf>,
    /// Relative tolerance of the replay integration.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Limit on the max deviation relative to the solution's max magnitude.
    #[arg(long)]
    pub max_deviation: Option<f64>,
    /// Limit on relative Wronskian and invariant drift.
    #[arg(long)]
    pub max_drift: Option<f64>,
    // Present so a shared config file can carry them; verify writes nothing.
    #[arg(skip)]
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[arg(skip)]
    #[serde(default)]
    pub format: Option<Format>,
}

layered!(VerifyArgs; options: [input, tol, max_deviation, max_drift, output, format]; switches: []);

struct Limits {
    tol: Tolerance,
    deviation: f64,
    drift: f64,
}

/// One named check: measured value, limit and where the worst value sits.
/// The limit is an upper bound unless `floor` is set.
struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
    floor: bool,
    at: Option<String>,
}

impl Check {
    fn new(name: &'static str, value: f64, limit: f64) -> Self {
        Self {
            name,
            value,
            limit,
            floor: false,
            at: None,
        }
    }

    fn at_least(name: &'static str, value: f64, limit: f64) -> Self {
        Self {
            floor: true,
            ..Self::new(name, value, limit)
        }
    }

    fn at(mut self, where_: String) -> Self {
        self.at = Some(where_);
        self
    }

    fn passed(&self) -> bool {
        if self.floor {
            self.value >= self.limit
        } else {
            self.value <= self.limit
        }
    }
}

/// Index and value of the largest entry.
fn worst(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    values
        .into_iter()
        .enumerate()
        .fold((0, 0.0), |(bi, bv), (i, v)| {
            if v > bv || v.is_nan() {
                (i, v)
            } else {
                (bi, bv)
            }
        })
}

fn relative_drift(values: &[f64]) -> (usize, f64) {
    let first = values[0];
    worst(values.iter().map(|v| (v - first).abs() / first.abs()))
}

fn deviation_check(
    name: &'static str,
    replay: &[f64],
    stored: &[f64],
    times: &[f64],
    limit: f64,
) -> Check {
    let scale = stored.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let (i, dev) = worst(replay.iter().zip(stored).map(|(a, b)| (a - b).abs()));
    Check::new(name, if scale > 0.0 { dev / scale } else { dev }, limit).at(format!(
        "row {} (t = {})",
        i + 1,
        times[i]
    ))
}

fn require_rows(n: usize) -> Result<(), CliError> {
    if n < 4 {
        return Err(CliError::usage(format!(
            "need at least four rows to replay, found {n}"
        )));
    }
    Ok(())
}

fn verify_pair_csv(path: &Path, lim: &Limits) -> Result<Vec<Check>, CliError> {
    let rows: Vec<OscillatorState> = read_csv_file(path, &PAIR_HEADER)?;
    require_rows(rows.len())?;
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let omega = SampledCoefficient::new(times.clone(), rows.iter().map(|r| r.omega_sq).collect())?;
    let run = integrate_tdhoe(
        |t| omega.at(t),
        rows[0].x,
        rows[0].xdot,
        Span::new(times[0], times[times.len() - 1]),
        lim.tol,
        &times,
    )?;
    let x: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let xdot: Vec<f64> = rows.iter().map(|r| r.xdot).collect();
    let l: Vec<f64> = rows.iter().map(|r| r.rho * r.rho * r.omega_inst).collect();
    let (li, l_drift) = relative_drift(&l);
    let rho_max = rows.iter().fold(0.0_f64, |m, r| m.max(r.rho));
    let (pi, polar) = worst(
        rows.iter()
            .map(|r| (r.x - r.rho * r.theta.cos()).abs() / rho_max),
    );
    Ok(vec![
        deviation_check("replayed x", &run.real(), &x, &times, lim.deviation),
        deviation_check(
            "replayed ẋ",
            &run.real_derivative(),
            &xdot,
            &times,
            lim.deviation,
        ),
        Check::new("Wronskian drift", run.wronskian_drift, lim.drift),
        Check::new("ρ²θ̇ drift", l_drift, lim.drift).at(format!(
            "row {} (t = {})",
            li + 1,
            times[li]
        )),
        Check::new("x = ρ cos θ", polar, lim.drift).at(format!(
            "row {} (t = {})",
            pi + 1,
            times[pi]
        )),
    ])
}

fn verify_pair_json(path: &Path, lim: &Limits) -> Result<Vec<Check>, CliError> {
    let doc: PairDocument = read_json_file(path)?;
    let phase = PhaseExpr::parse(&doc.phase_source, &doc.variable)?;
    let pair = generate_pair(&phase, doc.l_tilde, doc.mass, doc.grid)?;
    if pair.len() != doc.samples.len() {
        return Err(CliError::VerifyFailed(format!(
            "document has {} samples, its grid has {}",
            doc.samples.len(),
            pair.len()
        )));
    }
    let times = pair.times();
    let stored: Vec<f64> = doc.samples.iter().map(|s| s.x).collect();
    let rebuilt: Vec<f64> = pair.samples.iter().map(|s| s.x).collect();
    let rep = replay_pair(&pair, lim.tol)?;
    let inv = pair.check_invariants()?;
    Ok(vec![
        deviation_check(
            "stored vs rebuilt x",
            &rebuilt,
            &stored,
            &times,
            lim.deviation,
        ),
        Check::new("replayed x", rep.max_deviation, lim.deviation),
        Check::new("Wronskian drift", rep.wronskian_drift, lim.drift),
        Check::new("L drift", inv.l_drift, lim.drift),
        Check::new("ODE residual", inv.construction_residual, lim.drift),
    ])
}

fn complex_deviation(
    run: &IntegrationResult,
    stored: &[Complex64],
    times: &[f64],
    limit: f64,
) -> Check {
    let scale = stored.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let (i, dev) = worst(run.y.iter().zip(stored).map(|(a, b)| (a - b).norm()));
    Check::new("replayed ψ", dev / scale, limit).at(format!("row {} (x = {})", i + 1, times[i]))
}

fn verify_tunnel_csv(path: &Path, lim: &Limits) -> Result<Vec<Check>, CliError> {
    let rows: Vec<TunnelRow> = read_csv_file(path, &TUNNEL_HEADER)?;
    require_rows(rows.len())?;
    let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let omega = SampledCoefficient::new(xs.clone(), rows.iter().map(|r| r.omega_bar_sq).collect())?;
    let psi: Vec<Complex64> = rows
        .iter()
        .map(|r| Complex64::new(r.re_psi, r.im_psi))
        .collect();
    let dpsi: Vec<Complex64> = rows
        .iter()
        .map(|r| Complex64::new(r.re_dpsi, r.im_dpsi))
        .collect();
    let run = integrate_tdhoe_complex(
        |x| omega.at(x),
        psi[0],
        dpsi[0],
        Span::new(xs[0], xs[xs.len() - 1]),
        lim.tol,
        &xs,
    )?;
    let w: Vec<f64> = psi
        .iter()
        .zip(&dpsi)
        .map(|(p, d)| (p.conj() * d).im)
        .collect();
    let (wi, w_drift) = relative_drift(&w);
    let (di, density) = worst(
        rows.iter()
            .zip(&psi)
            .map(|(r, p)| (r.density - p.norm_sqr()).abs()),
    );
    let (ui, u_consistency) = worst(
        rows.iter()
            .map(|r| (r.omega_bar_sq - (1.0 - r.u_bar)).abs()),
    );
    println!("Wronskian       {:.12}", w[0]);
    Ok(vec![
        complex_deviation(&run, &psi, &xs, lim.deviation),
        Check::new("replay Wronskian drift", run.wronskian_drift, lim.drift),
        Check::new("stored Wronskian drift", w_drift, lim.drift).at(format!(
            "row {} (x = {})",
            wi + 1,
            xs[wi]
        )),
        Check::new("density = |ψ|²", density, lim.drift).at(format!(
            "row {} (x = {})",
            di + 1,
            xs[di]
        )),
        Check::new("Ω̄² = 1 − ū", u_consistency, lim.drift).at(format!(
            "row {} (x = {})",
            ui + 1,
            xs[ui]
        )),
    ])
}

fn verify_hermite(path: &Path, lim: &Limits) -> Result<Vec<Check>, CliError> {
    let rows: Vec<HermiteRow> = read_csv_file(path, &HERMITE_HEADER)?;
    let mut checks = Vec::new();
    let mut orders: Vec<u32> = rows.iter().map(|r| r.n).collect();
    orders.dedup();
    for n in orders {
        let block: Vec<&HermiteRow> = rows.iter().filter(|r| r.n == n).collect();
        require_rows(block.len())?;
        let h = hermite_pair(n)?;
        let times: Vec<f64> = block.iter().map(|r| r.t).collect();
        let stored: Vec<f64> = block.iter().map(|r| r.value).collect();
        let closed: Vec<f64> = times.iter().map(|t| h.solution(*t)).collect();
        // H_n decays in both tails, so each half is integrated from its outer
        // end inwards, where the unwanted companion solution shrinks.
        let (mid, last) = (times.len() / 2, times.len() - 1);
        let half = |from: usize, samples: &[f64]| {
            integrate_tdhoe(
                |t| h.omega_sq(t),
                block[from].value,
                block[from].deriv,
                Span::new(times[from], times[mid]),
                lim.tol,
                samples,
            )
        };
        let mut replay = half(0, &times[..=mid])?.real();
        replay.pop();
        replay.extend(half(last, &times[mid..])?.real());
        checks.push(deviation_check(
            "closed form",
            &closed,
            &stored,
            &times,
            lim.deviation,
        ));
        checks.push(deviation_check(
            "replayed H_n",
            &replay,
            &stored,
            &times,
            lim.deviation,
        ));
    }
    Ok(checks)
}

fn verify_analog(path: &Path, lim: &Limits) -> Result<Vec<Check>, CliError> {
    let rows: Vec<AnalogRow> = read_csv_file(path, &ANALOG_HEADER)?;
    require_rows(rows.len())?;
    let w: Vec<f64> = rows.iter().map(|r| r.wronskian).collect();
    let (i, drift) = relative_drift(&w);
    Ok(vec![Check::new("Wronskian drift", drift, lim.drift)
        .at(format!("row {} (t̄ = {})", i + 1, rows[i].t_bar))])
}

/// Products in a range table share the factor 2/L; every row must agree
/// on it, and for the averaged table the products must be at least 1.
fn range_checks(
    rows: &[(f64, f64, f64, f64, f64, f64)],
    lim: &Limits,
    averaged: bool,
) -> Result<Vec<Check>, CliError> {
    if rows.is_empty() {
        return Err(CliError::usage("range table is empty"));
    }
    let factors: Vec<f64> = rows
        .iter()
        .flat_map(|&(t, de, dx, dp, ne, nxp)| [ne / (de * t), nxp / (dx * dp)])
        .collect();
    let (fi, spread) = relative_drift(&factors);
    let mut checks =
        vec![Check::new("common 2/L factor", spread, lim.drift).at(format!("row {}", fi / 2 + 1))];
    let (mi, min) = rows.iter().map(|r| r.4.min(r.5)).enumerate().fold(
        (0, f64::INFINITY),
        |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) },
    );
    println!(
        "smallest normalized product {min:.6} (row {}, T = {})",
        mi + 1,
        rows[mi].0
    );
    if averaged {
        checks.push(
            Check::at_least("min averaged product", min, 1.0).at(format!(
                "row {} (T = {})",
                mi + 1,
                rows[mi].0
            )),
        );
    }
    Ok(checks)
}

pub fn run(args: VerifyArgs) -> Result<(), CliError> {
    let path = args
        .input
        .clone()
        .ok_or_else(|| CliError::usage("verify needs an input file"))?;
    let lim = Limits {
        tol: Tolerance::new(args.tol.unwrap_or(1e-10), 1e-14),
        deviation: args.max_deviation.unwrap_or(1e-6),
        drift: args.max_drift.unwrap_or(1e-8),
    };
    let kind = detect_kind(&path)?;
    println!("{}: {kind:?}", path.display());
    let checks = match kind {
        FileKind::PairCsv => verify_pair_csv(&path, &lim)?,
        FileKind::PairJson => verify_pair_json(&path, &lim)?,
        FileKind::TunnelCsv => verify_tunnel_csv(&path, &lim)?,
        FileKind::HermiteTable => verify_hermite(&path, &lim)?,
        FileKind::AnalogCsv => verify_analog(&path, &lim)?,
        FileKind::RangeCells => {
            let rows: Vec<CellRow> = read_csv_file(&path, &CELLS_HEADER)?;
            let t: Vec<_> = rows
                .iter()
                .map(|r| {
                    (
                        r.t_cap,
                        r.delta_e_tk,
                        r.delta_x,
                        r.delta_p,
                        r.norm_energy_product,
                        r.norm_xp_product,
                    )
                })
                .collect();
            range_checks(&t, &lim, false)?
        }
        FileKind::RangeSummary => {
            let rows: Vec<SummaryRow> = read_csv_file(&path, &SUMMARY_HEADER)?;
            let t: Vec<_> = rows
                .iter()
                .map(|r| {
                    (
                        r.t_cap,
                        r.delta_e_tk,
                        r.delta_x,
                        r.delta_p,
                        r.norm_energy_product,
                        r.norm_xp_product,
                    )
                })
                .collect();
            range_checks(&t, &lim, true)?
        }
    };
    let mut failed = Vec::new();
    for c in &checks {
        let tag = if c.passed() { "ok  " } else { "FAIL" };
        let at =
            c.at.as_deref()
                .map(|a| format!(" worst at {a}"))
                .unwrap_or_default();
        let bound = if c.floor { "≥" } else { "≤" };
        println!(
            "{tag} {:<24} {:.3e} (need {bound} {:.1e}){at}",
            c.name, c.value, c.limit
        );
        if !c.passed() {
            failed.push(format!("{}{at}", c.name));
        }
    }
    if failed.is_empty() {
        println!("verified");
        Ok(())
    } else {
        Err(CliError::VerifyFailed(format!(
            "verification failed: {}",
            failed.join("; ")
        )))
    }
}
