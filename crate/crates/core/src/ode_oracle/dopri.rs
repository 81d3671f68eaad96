//! Dormand-Prince 5(4) with Hairer's fourth-order continuous extension,
//! specialised to y'' = −Ω²(t)·y for a complex y stored as four reals
//! (Re y, Im y, Re y', Im y').

use super::OracleError;

pub(crate) type State = [f64; 4];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Config {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Stats {
    pub steps_taken: usize,
    pub steps_rejected: usize,
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

struct Rhs<'a, F> {
    omega_sq: &'a F,
}

impl<F: Fn(f64) -> f64> Rhs<'_, F> {
    #[inline]
    fn eval(&self, t: f64, y: &State) -> Result<State, OracleError> {
        let w = (self.omega_sq)(t);
        if !w.is_finite() {
            return Err(OracleError::NonFiniteRhs { t });
        }
        Ok([y[2], y[3], -w * y[0], -w * y[1]])
    }
}

/// Dense-output coefficients of the last accepted step.
struct Dense {
    t_old: f64,
    h: f64,
    r: [State; 5],
}

impl Dense {
    fn eval(&self, t: f64) -> State {
        let s = (t - self.t_old) / self.h;
        let s1 = 1.0 - s;
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.r[0][i]
                + s * (self.r[1][i] + s1 * (self.r[2][i] + s * (self.r[3][i] + s1 * self.r[4][i])));
        }
        out
    }
}

fn error_norm(y: &State, y_new: &State, err: &State, cfg: &Config) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let sc = cfg.abs + cfg.rel * y[i].abs().max(y_new[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    (acc / 4.0).sqrt()
}

fn weighted_norm(v: &State, y: &State, cfg: &Config) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let sc = cfg.abs + cfg.rel * y[i].abs();
        acc += (v[i] / sc).powi(2);
    }
    (acc / 4.0).sqrt()
}

/// Integrates from `t0` to `t1` (either direction). `samples` must be
/// ordered in the direction of integration and lie within the span; each
/// is reported through `emit(Some(index), t, state)` with the dense-output
/// state, and every accepted step end point through `emit(None, t, state)`.
pub(crate) fn integrate<F, S>(
    omega_sq: &F,
    t0: f64,
    t1: f64,
    y0: State,
    samples: &[f64],
    cfg: &Config,
    mut emit: S,
) -> Result<Stats, OracleError>
where
    F: Fn(f64) -> f64,
    S: FnMut(Option<usize>, f64, &State),
{
    let rhs = Rhs { omega_sq };
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut stats = Stats::default();
    let mut next_sample = 0;
    while next_sample < samples.len() && samples[next_sample] == t0 {
        emit(Some(next_sample), t0, &y0);
        next_sample += 1;
    }
    if span == 0.0 {
        return Ok(stats);
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs.eval(t, &y)?;

    let mut h = match cfg.fixed_step {
        Some(h) => h.min(span),
        None => initial_step(&rhs, t, &y, &k1, dir, cfg)?
            .min(cfg.max_step)
            .min(span),
    };
    let mut last_rejected = false;

    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        let mut last = false;
        if h >= remaining || (cfg.fixed_step.is_some() && remaining - h < 1e-6 * h) {
            h = remaining;
            last = true;
        } else if cfg.fixed_step.is_none() && h > 0.5 * remaining && h < remaining {
            // Split the tail evenly instead of leaving a sliver.
            h = 0.5 * remaining;
        }
        if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(OracleError::StepSizeUnderflow { t, h });
        }
        if stats.steps_taken + stats.steps_rejected >= cfg.max_steps {
            return Err(OracleError::StepLimitExceeded {
                t,
                steps: cfg.max_steps,
            });
        }
        let hs = h * dir;

        let k2 = rhs.eval(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = rhs.eval(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = rhs.eval(
            t + C4 * hs,
            &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = rhs.eval(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let t_new = if last { t1 } else { t + hs };
        let k6 = rhs.eval(
            t + hs,
            &axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y_new = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs.eval(t_new, &y_new)?;

        let mut err = [0.0; 4];
        for i in 0..4 {
            err[i] =
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err_norm = match cfg.fixed_step {
            Some(_) => 0.0,
            None => error_norm(&y, &y_new, &err, cfg),
        };

        if err_norm <= 1.0 {
            stats.steps_taken += 1;
            let dense = {
                let mut r = [[0.0; 4]; 5];
                for i in 0..4 {
                    let ydiff = y_new[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    r[0][i] = y[i];
                    r[1][i] = ydiff;
                    r[2][i] = bspl;
                    r[3][i] = ydiff - hs * k7[i] - bspl;
                    r[4][i] = hs
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                Dense { t_old: t, h: hs, r }
            };
            while next_sample < samples.len() && (samples[next_sample] - t_new) * dir <= 0.0 {
                let ts = samples[next_sample];
                let ys = if ts == t_new { y_new } else { dense.eval(ts) };
                emit(Some(next_sample), ts, &ys);
                next_sample += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            emit(None, t, &y);
            if last {
                break;
            }
            if cfg.fixed_step.is_none() {
                let mut fac = 0.9 * err_norm.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 10.0);
                if last_rejected {
                    fac = fac.min(1.0);
                }
                h = (h * fac).min(cfg.max_step);
            }
            last_rejected = false;
        } else {
            stats.steps_rejected += 1;
            last_rejected = true;
            h *= (0.9 * err_norm.powf(-0.2)).max(0.2);
        }
    }
    if next_sample < samples.len() {
        return Err(OracleError::SampleOutOfSpan {
            t: samples[next_sample],
        });
    }
    Ok(stats)
}

fn initial_step<F: Fn(f64) -> f64>(
    rhs: &Rhs<'_, F>,
    t: f64,
    y: &State,
    f0: &State,
    dir: f64,
    cfg: &Config,
) -> Result<f64, OracleError> {
    let d0 = weighted_norm(y, y, cfg);
    let d1 = weighted_norm(f0, y, cfg);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = axpy(y, h0 * dir, &[(1.0, f0)]);
    let f1 = rhs.eval(t + h0 * dir, &y1)?;
    let mut diff = [0.0; 4];
    for i in 0..4 {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = weighted_norm(&diff, y, cfg) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1))
}
