// Copyright 2026 the Grainflow Authors
// SPDX-License-Identifier: Apache-2.0

//! Time-step and smoothing-scale selection.

use serde::Serialize;

use crate::error::ScheduleError;
use crate::scalar::{lit, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Constants of the existence proof: `ε < j⁻⁶` and a dyadic step near `ε^{c_a}`.
    Paper,
    /// User-chosen `ε` and `Δt` under a stability bound.
    Practical,
}

/// Inputs beyond mode, dimension and `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleOptions<T> {
    /// Required in practical mode.
    pub dt: Option<T>,
    /// Stability constant: `Δt ≤ κ ε²`.
    pub kappa: T,
    /// Longest segment after remeshing; defaults to `ε/4`.
    pub h_max: Option<T>,
    pub steps: usize,
    pub remesh_every: usize,
    pub extinction: T,
    /// Decay rate of the weight function.
    pub c1: T,
}

impl<T: Scalar> Default for ScheduleOptions<T> {
    fn default() -> Self {
        Self { dt: None, kappa: lit(0.05), h_max: None, steps: 0, remesh_every: 10, extinction: lit(1e-3), c1: T::zero() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Schedule<T> {
    pub mode: Mode,
    pub j: u32,
    pub epsilon: T,
    /// Exponent linking the step to the smoothing scale, `3n + 20`.
    pub c_a: u32,
    pub dt: T,
    /// `Δt = 2^{-p}` in paper mode.
    pub p: Option<u32>,
    pub steps: usize,
    pub remesh_every: usize,
    pub h_min: T,
    pub h_max: T,
    pub extinction: T,
}

/// `ε^k` and `2^{-p}` may leave the exponent range of `T`; this keeps the
/// arithmetic in base-2 logarithms.
fn log2<T: Scalar>(x: T) -> f64 {
    x.to_f64_lossy().log2()
}

/// Builds a schedule for `n`-dimensional boundaries in `R^{n+1}`.
///
/// Paper mode requires `j ≥ max(1, c₁)`, `ε < j⁻⁶` and `(2j)⁶ ε ≤ 1`, and
/// returns the unique `Δt = 2^{-p}` in `(ε^{c_a}/2, ε^{c_a}]`. Without an
/// explicit `ε` it takes the largest power of two allowed. Practical mode
/// checks `Δt ≤ κ ε²` and `ε ≥ 4 h_max`.
pub fn schedule_params<T: Scalar>(
    mode: Mode,
    n: u32,
    j: u32,
    epsilon: Option<T>,
    opts: &ScheduleOptions<T>,
) -> Result<Schedule<T>, ScheduleError> {
    let c_a = 3 * n + 20;
    if j < 1 {
        return Err(ScheduleError::Infeasible { relation: "j >= 1", detail: format!("j = {j}") });
    }
    match mode {
        Mode::Paper => {
            let jf = j as f64;
            if jf < opts.c1.to_f64_lossy() {
                return Err(ScheduleError::Infeasible {
                    relation: "j >= c1",
                    detail: format!("j = {j}, c1 = {}", opts.c1),
                });
            }
            let eps = match epsilon {
                Some(e) => e,
                None => {
                    let q = (6.0 * (2.0 * jf).log2()).ceil() as i32;
                    lit::<T>(2.0).powi(-q)
                }
            };
            if !(eps > T::zero()) {
                return Err(ScheduleError::Infeasible { relation: "epsilon > 0", detail: format!("epsilon = {eps}") });
            }
            let le = log2(eps);
            if !(le + 6.0 * jf.log2() < 0.0) {
                return Err(ScheduleError::Infeasible {
                    relation: "epsilon < j^-6",
                    detail: format!("epsilon = {eps}, j^-6 = {:e}", jf.powi(-6)),
                });
            }
            if le + 6.0 * (2.0 * jf).log2() > 0.0 {
                return Err(ScheduleError::Infeasible {
                    relation: "j <= epsilon^(-1/6) / 2",
                    detail: format!("j = {j}, epsilon^(-1/6) / 2 = {:e}", 0.5 * eps.to_f64_lossy().powf(-1.0 / 6.0)),
                });
            }
            // Δt = 2^{-p} ∈ (ε^{c_a}/2, ε^{c_a}] ⇔ p = ⌈-c_a log₂ ε⌉.
            let target = -(c_a as f64) * le;
            let p = target.ceil() as i64;
            let p = if (p as f64 - 1.0) >= target { p - 1 } else { p };
            let p = u32::try_from(p).map_err(|_| ScheduleError::Infeasible {
                relation: "dt = 2^-p with p >= 0",
                detail: format!("-c_a log2(epsilon) = {target}"),
            })?;
            let dt = lit::<T>(2.0).powi(-(p as i32));
            if !(dt > T::zero()) {
                return Err(ScheduleError::Infeasible {
                    relation: "dt representable",
                    detail: format!("2^-{p} underflows this scalar type"),
                });
            }
            let h_max = opts.h_max.unwrap_or(eps * lit(0.25));
            Ok(Schedule {
                mode,
                j,
                epsilon: eps,
                c_a,
                dt,
                p: Some(p),
                steps: opts.steps,
                remesh_every: opts.remesh_every,
                h_min: h_max * lit(0.25),
                h_max,
                extinction: opts.extinction,
            })
        }
        Mode::Practical => {
            let eps = epsilon.ok_or(ScheduleError::Infeasible { relation: "epsilon given", detail: "practical mode needs epsilon".into() })?;
            let dt = opts.dt.ok_or(ScheduleError::Infeasible { relation: "dt given", detail: "practical mode needs dt".into() })?;
            if !(eps > T::zero() && dt > T::zero()) {
                return Err(ScheduleError::Infeasible { relation: "epsilon > 0, dt > 0", detail: format!("epsilon = {eps}, dt = {dt}") });
            }
            if dt > opts.kappa * eps * eps {
                return Err(ScheduleError::Infeasible {
                    relation: "dt <= kappa epsilon^2",
                    detail: format!("dt = {dt}, kappa epsilon^2 = {}", opts.kappa * eps * eps),
                });
            }
            let h_max = opts.h_max.unwrap_or(eps * lit(0.25));
            if eps < lit::<T>(4.0) * h_max {
                return Err(ScheduleError::Infeasible {
                    relation: "epsilon >= 4 h_max",
                    detail: format!("epsilon = {eps}, h_max = {h_max}"),
                });
            }
            Ok(Schedule {
                mode,
                j,
                epsilon: eps,
                c_a,
                dt,
                p: None,
                steps: opts.steps,
                remesh_every: opts.remesh_every,
                h_min: h_max * lit(0.25),
                h_max,
                extinction: opts.extinction,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_dyadic_step() {
        let s = schedule_params::<f64>(Mode::Paper, 1, 2, Some(2f64.powi(-12)), &ScheduleOptions::default()).unwrap();
        assert_eq!(s.c_a, 23);
        assert_eq!(s.p, Some(276));
        assert_eq!(s.dt, 2f64.powi(-276));
        assert_eq!(s.dt, s.epsilon.powi(23));
    }

    #[test]
    fn paper_default_epsilon() {
        let s = schedule_params::<f64>(Mode::Paper, 1, 2, None, &ScheduleOptions::default()).unwrap();
        assert_eq!(s.epsilon, 2f64.powi(-12));
    }

    #[test]
    fn paper_rejects_large_epsilon() {
        let e = schedule_params::<f64>(Mode::Paper, 1, 2, Some(0.1), &ScheduleOptions::default()).unwrap_err();
        assert!(matches!(e, ScheduleError::Infeasible { relation: "epsilon < j^-6", .. }), "{e}");
    }

    #[test]
    fn paper_rejects_large_j() {
        let e = schedule_params::<f64>(Mode::Paper, 1, 3, Some(2f64.powi(-12)), &ScheduleOptions::default()).unwrap_err();
        assert!(matches!(e, ScheduleError::Infeasible { relation: "j <= epsilon^(-1/6) / 2", .. }), "{e}");
    }

    #[test]
    fn paper_step_in_half_open_window() {
        let eps = 0.003f64;
        let s = schedule_params::<f64>(Mode::Paper, 1, 1, Some(eps), &ScheduleOptions::default()).unwrap();
        let p = s.p.unwrap() as f64;
        let target = -23.0 * eps.log2();
        assert!(p >= target && p - 1.0 < target);
    }

    #[test]
    fn paper_f32_underflow_reported() {
        assert!(schedule_params::<f32>(Mode::Paper, 1, 2, Some(2f32.powi(-12)), &ScheduleOptions::default()).is_err());
    }

    #[test]
    fn practical_stability() {
        let opts = ScheduleOptions { dt: Some(1e-4), kappa: 0.05, ..ScheduleOptions::default() };
        assert!(schedule_params(Mode::Practical, 1, 4, Some(0.05), &opts).is_ok());
        let opts = ScheduleOptions { dt: Some(2e-4), ..opts };
        assert!(schedule_params(Mode::Practical, 1, 4, Some(0.05), &opts).is_err());
    }
}
