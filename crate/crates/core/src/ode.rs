//! Classical RK4 with step-doubling error control on flat state vectors.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrationError {
    #[error("step size fell below {dt_min:e} at t = {t} ({reason})")]
    StepUnderflow { t: f64, dt_min: f64, reason: String },
    #[error("right-hand side failed at t = {t}: {message}")]
    Rhs { t: f64, message: String },
}

/// Step control for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl<S> {
    pub dt_initial: S,
    pub dt_min: S,
    pub dt_max: S,
    /// Bound on the step-doubling error estimate, scaled by `1 + |y|∞`.
    pub tolerance: S,
}

impl<S: Real> Default for StepControl<S> {
    fn default() -> Self {
        Self { dt_initial: S::lit(1e-3), dt_min: S::lit(1e-12), dt_max: S::lit(0.05), tolerance: S::lit(1e-8) }
    }
}

/// Reason an evaluation or a proposed state was refused.
pub type Rejection = String;

fn axpy<S: Real>(y: &[S], a: S, k: &[S]) -> Vec<S> {
    y.iter().zip(k).map(|(&yi, &ki)| yi + a * ki).collect()
}

/// One classical RK4 step.
pub fn rk4_step<S: Real, F>(f: &mut F, t: S, y: &[S], dt: S) -> Result<Vec<S>, Rejection>
where
    F: FnMut(S, &[S]) -> Result<Vec<S>, Rejection>,
{
    let half = dt / S::lit(2.0);
    let k1 = f(t, y)?;
    let k2 = f(t + half, &axpy(y, half, &k1))?;
    let k3 = f(t + half, &axpy(y, half, &k2))?;
    let k4 = f(t + dt, &axpy(y, dt, &k3))?;
    let sixth = dt / S::lit(6.0);
    Ok((0..y.len())
        .map(|i| y[i] + sixth * (k1[i] + S::lit(2.0) * (k2[i] + k3[i]) + k4[i]))
        .collect())
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`.
///
/// A step is accepted when two half steps agree with one full step within
/// the tolerance and `admissible` accepts the result; otherwise the step is
/// halved. `observe` is called at `t0` and after every accepted step and
/// may return `false` to stop early.
pub fn integrate<S: Real, F, A, O>(
    mut f: F,
    admissible: A,
    mut observe: O,
    y0: Vec<S>,
    t0: S,
    t_end: S,
    control: &StepControl<S>,
) -> Result<(S, Vec<S>), IntegrationError>
where
    F: FnMut(S, &[S]) -> Result<Vec<S>, Rejection>,
    A: Fn(&[S]) -> Result<(), Rejection>,
    O: FnMut(S, &[S]) -> bool,
{
    let mut t = t0;
    let mut y = y0;
    let mut dt = control.dt_initial.min(control.dt_max);
    if !observe(t, &y) {
        return Ok((t, y));
    }
    let eps = S::epsilon() * S::lit(16.0) * t_end.abs().max(S::one());
    while t < t_end - eps {
        let step = dt.min(t_end - t);
        let attempt = (|| -> Result<(Vec<S>, S), Rejection> {
            let full = rk4_step(&mut f, t, &y, step)?;
            let half = step / S::lit(2.0);
            let mid = rk4_step(&mut f, t, &y, half)?;
            let two = rk4_step(&mut f, t + half, &mid, half)?;
            admissible(&mid)?;
            admissible(&two)?;
            let scale = S::one() + two.iter().fold(S::zero(), |m, &v| m.max(v.abs()));
            let err = full.iter().zip(&two).fold(S::zero(), |m, (&a, &b)| m.max((a - b).abs())) / scale;
            if !err.is_finite() {
                return Err("non-finite state".into());
            }
            Ok((two, err))
        })();
        match attempt {
            Ok((next, err)) if err <= control.tolerance => {
                t = t + step;
                y = next;
                if err < control.tolerance / S::lit(64.0) {
                    dt = (dt * S::lit(2.0)).min(control.dt_max);
                }
                if !observe(t, &y) {
                    break;
                }
            }
            outcome => {
                let reason = match outcome {
                    Ok((_, err)) => format!("error estimate {:e}", err.to_f64_lossy()),
                    Err(r) => r,
                };
                dt = step / S::lit(2.0);
                if dt < control.dt_min {
                    return Err(IntegrationError::StepUnderflow {
                        t: t.to_f64_lossy(),
                        dt_min: control.dt_min.to_f64_lossy(),
                        reason,
                    });
                }
            }
        }
    }
    Ok((t, y))
}
