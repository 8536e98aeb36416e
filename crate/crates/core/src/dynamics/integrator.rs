//! Dormand-Prince 8(5,3) with the seventh-order dense output.
//!
//! Step control, error norm and initial step follow the reference
//! implementation of Hairer and Wanner as distributed with SciPy.

use serde::{Deserialize, Serialize};

use super::tableau::{A, B, C, D, E3, E5, INTERPOLATOR_POWER, N_STAGES, N_STAGES_EXTENDED};
use crate::error::{Error, Result};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

/// Any state component beyond this magnitude counts as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub max_step: f64,
    pub first_step: Option<f64>,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 5_000_000,
            max_step: f64::INFINITY,
            first_step: None,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.rtol) && positive(self.atol)) {
            return Err(Error::InvalidArgument(format!(
                "tolerances must be positive and finite (rtol = {}, atol = {})",
                self.rtol, self.atol
            )));
        }
        if !(self.max_step > 0.0) || self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_step and max_steps must be positive".into()));
        }
        if let Some(h) = self.first_step {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::InvalidArgument(format!("first_step = {h} must be positive")));
            }
        }
        Ok(())
    }
}

/// Interpolant over one accepted step.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub t_old: f64,
    pub t_new: f64,
    y_old: Vec<f64>,
    f: Vec<Vec<f64>>,
}

impl DenseSegment {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut y = vec![0.0; self.y_old.len()];
        self.eval_into(t, &mut y);
        y
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let x = (t - self.t_old) / (self.t_new - self.t_old);
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, row) in self.f.iter().rev().enumerate() {
            let w = if i % 2 == 0 { x } else { 1.0 - x };
            for (o, &r) in out.iter_mut().zip(row) {
                *o = (*o + r) * w;
            }
        }
        for (o, &y0) in out.iter_mut().zip(&self.y_old) {
            *o += y0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Running,
    Finished,
}

/// Adaptive stepper for `y' = f(t, y)` towards `t_bound` (either direction).
pub struct Dop853<F> {
    fun: F,
    settings: IntegratorSettings,
    t: f64,
    y: Vec<f64>,
    f: Vec<f64>,
    t_bound: f64,
    direction: f64,
    h_abs: f64,
    t_old: f64,
    y_old: Vec<f64>,
    h_previous: f64,
    k: Vec<Vec<f64>>,
    scratch: Vec<f64>,
    steps: usize,
    rejected: usize,
    evaluations: usize,
}

fn rms(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    (v.map(|x| x * x).sum::<f64>() / n as f64).sqrt()
}

impl<F> Dop853<F>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    pub fn new(mut fun: F, t0: f64, y0: &[f64], t_bound: f64, settings: IntegratorSettings) -> Result<Self> {
        settings.validate()?;
        if !t0.is_finite() || !t_bound.is_finite() || y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial state or time span".into()));
        }
        let n = y0.len();
        let mut f = vec![0.0; n];
        fun(t0, y0, &mut f);
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("right-hand side at t = {t0}")));
        }
        let direction = if t_bound >= t0 { 1.0 } else { -1.0 };
        let mut solver = Self {
            fun,
            settings,
            t: t0,
            y: y0.to_vec(),
            f,
            t_bound,
            direction,
            h_abs: 0.0,
            t_old: t0,
            y_old: y0.to_vec(),
            h_previous: 0.0,
            k: vec![vec![0.0; n]; N_STAGES_EXTENDED],
            scratch: vec![0.0; n],
            steps: 0,
            rejected: 0,
            evaluations: 1,
        };
        solver.h_abs = match settings.first_step {
            Some(h) => h.min((t_bound - t0).abs()),
            None => solver.initial_step(),
        };
        Ok(solver)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn initial_step(&mut self) -> f64 {
        let n = self.y.len();
        let interval = (self.t_bound - self.t).abs();
        if n == 0 {
            return interval;
        }
        if interval == 0.0 {
            return 0.0;
        }
        let (rtol, atol) = (self.settings.rtol, self.settings.atol);
        let scale: Vec<f64> = self.y.iter().map(|v| atol + v.abs() * rtol).collect();
        let d0 = rms(self.y.iter().zip(&scale).map(|(y, s)| y / s), n);
        let d1 = rms(self.f.iter().zip(&scale).map(|(f, s)| f / s), n);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(interval);
        let y1: Vec<f64> = self
            .y
            .iter()
            .zip(&self.f)
            .map(|(y, f)| y + h0 * self.direction * f)
            .collect();
        let mut f1 = vec![0.0; n];
        (self.fun)(self.t + h0 * self.direction, &y1, &mut f1);
        self.evaluations += 1;
        let d2 = rms(
            f1.iter().zip(&self.f).zip(&scale).map(|((a, b), s)| (a - b) / s),
            n,
        ) / h0;
        let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        if !h1.is_finite() {
            return h0;
        }
        (100.0 * h0).min(h1).min(interval)
    }

    /// Main stages `K[0..=N_STAGES]`; `K[N_STAGES]` is `f(t + h, y_new)`.
    fn rk_step(&mut self, h: f64, y_new: &mut [f64]) {
        let n = self.y.len();
        self.k[0].copy_from_slice(&self.f);
        for s in 1..N_STAGES {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in self.k[..s].iter().enumerate() {
                    acc += A[s][j] * kj[i];
                }
                self.scratch[i] = self.y[i] + h * acc;
            }
            let (_, rest) = self.k.split_at_mut(s);
            (self.fun)(self.t + C[s] * h, &self.scratch, &mut rest[0]);
        }
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in self.k[..N_STAGES].iter().enumerate() {
                acc += B[j] * kj[i];
            }
            y_new[i] = self.y[i] + h * acc;
        }
        let (_, rest) = self.k.split_at_mut(N_STAGES);
        (self.fun)(self.t + h, y_new, &mut rest[0]);
        self.evaluations += N_STAGES;
    }

    fn error_norm(&self, h: f64, y_new: &[f64]) -> f64 {
        let n = self.y.len();
        let (rtol, atol) = (self.settings.rtol, self.settings.atol);
        let (mut e5, mut e3) = (0.0, 0.0);
        for i in 0..n {
            let scale = atol + self.y[i].abs().max(y_new[i].abs()) * rtol;
            let (mut a5, mut a3) = (0.0, 0.0);
            for (j, kj) in self.k[..=N_STAGES].iter().enumerate() {
                a5 += E5[j] * kj[i];
                a3 += E3[j] * kj[i];
            }
            e5 += (a5 / scale).powi(2);
            e3 += (a3 / scale).powi(2);
        }
        if e5 == 0.0 && e3 == 0.0 {
            return 0.0;
        }
        h.abs() * e5 / ((e5 + 0.01 * e3) * n as f64).sqrt()
    }

    /// Advance by one accepted step.
    pub fn step(&mut self) -> Result<StepOutcome> {
        if self.t == self.t_bound {
            return Ok(StepOutcome::Finished);
        }
        if self.steps >= self.settings.max_steps {
            return Err(Error::MaxStepsExceeded(self.settings.max_steps));
        }
        let min_step = 10.0 * (next_toward(self.t, self.direction) - self.t).abs();
        let mut h_abs = self.h_abs.min(self.settings.max_step);
        if h_abs < min_step {
            h_abs = min_step;
        }
        let mut y_new = vec![0.0; self.y.len()];
        let mut rejected_once = false;
        loop {
            if h_abs < min_step {
                return Err(Error::StepSizeUnderflow { t: self.t, h: h_abs });
            }
            let mut t_new = self.t + h_abs * self.direction;
            if self.direction * (t_new - self.t_bound) > 0.0 {
                t_new = self.t_bound;
            }
            let h = t_new - self.t;
            h_abs = h.abs();
            self.rk_step(h, &mut y_new);
            let err = self.error_norm(h, &y_new);
            if err.is_finite() && err < 1.0 {
                let mut factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    MAX_FACTOR.min(SAFETY * err.powf(ERROR_EXPONENT))
                };
                if rejected_once {
                    factor = factor.min(1.0);
                }
                self.h_abs = h_abs * factor;
                self.h_previous = h;
                self.t_old = self.t;
                std::mem::swap(&mut self.y_old, &mut self.y);
                self.y = y_new;
                self.f.copy_from_slice(&self.k[N_STAGES]);
                self.t = t_new;
                self.steps += 1;
                if self.y.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
                    return Err(Error::Divergence { t: self.t });
                }
                return Ok(if self.t == self.t_bound {
                    StepOutcome::Finished
                } else {
                    StepOutcome::Running
                });
            }
            let factor = if err.is_finite() {
                MIN_FACTOR.max(SAFETY * err.powf(ERROR_EXPONENT))
            } else {
                MIN_FACTOR
            };
            h_abs *= factor;
            rejected_once = true;
            self.rejected += 1;
        }
    }

    /// Interpolant over the last accepted step; costs three extra
    /// evaluations.
    pub fn dense_output(&mut self) -> DenseSegment {
        let n = self.y.len();
        let h = self.h_previous;
        for s in N_STAGES + 1..N_STAGES_EXTENDED {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in self.k[..s].iter().enumerate() {
                    acc += A[s][j] * kj[i];
                }
                self.scratch[i] = self.y_old[i] + h * acc;
            }
            let (_, rest) = self.k.split_at_mut(s);
            (self.fun)(self.t_old + C[s] * h, &self.scratch, &mut rest[0]);
        }
        self.evaluations += N_STAGES_EXTENDED - N_STAGES - 1;
        let mut f = vec![vec![0.0; n]; INTERPOLATOR_POWER];
        let f_old = &self.k[0];
        for i in 0..n {
            let dy = self.y[i] - self.y_old[i];
            f[0][i] = dy;
            f[1][i] = h * f_old[i] - dy;
            f[2][i] = 2.0 * dy - h * (self.f[i] + f_old[i]);
            for (r, drow) in D.iter().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in self.k.iter().enumerate() {
                    acc += drow[j] * kj[i];
                }
                f[3 + r][i] = h * acc;
            }
        }
        DenseSegment {
            t_old: self.t_old,
            t_new: self.t,
            y_old: self.y_old.clone(),
            f,
        }
    }
}

fn next_toward(t: f64, direction: f64) -> f64 {
    let bits = t.to_bits();
    if t == 0.0 {
        let tiny = f64::from_bits(1);
        return if direction > 0.0 { tiny } else { -tiny };
    }
    let up = (t > 0.0) == (direction > 0.0);
    f64::from_bits(if up { bits + 1 } else { bits - 1 })
}

/// Samples of an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub steps: usize,
    pub rejected_steps: usize,
}

/// Integrate `y' = f(t, y)` from `t0` to `t_end`, recording every accepted
/// step, or the points of `t_eval` when given (monotone in the direction of
/// integration).
pub fn integrate<F>(
    rhs: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    settings: IntegratorSettings,
    t_eval: Option<&[f64]>,
) -> Result<Solution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut solver = Dop853::new(rhs, t0, y0, t_end, settings)?;
    let mut out = Solution {
        t: Vec::new(),
        y: Vec::new(),
        steps: 0,
        rejected_steps: 0,
    };
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut pending = t_eval.unwrap_or(&[]).iter().copied().peekable();
    if t_eval.is_none() {
        out.t.push(t0);
        out.y.push(y0.to_vec());
    }
    while let Some(&te) = pending.peek() {
        if dir * (te - t0) > 0.0 {
            break;
        }
        out.t.push(te);
        out.y.push(y0.to_vec());
        pending.next();
    }
    loop {
        let outcome = solver.step()?;
        match t_eval {
            None => {
                out.t.push(solver.t());
                out.y.push(solver.y().to_vec());
            }
            Some(_) => {
                let t_now = solver.t();
                if pending.peek().is_some_and(|&te| dir * (te - t_now) <= 0.0) {
                    let seg = solver.dense_output();
                    while let Some(&te) = pending.peek() {
                        if dir * (te - t_now) > 0.0 {
                            break;
                        }
                        out.t.push(te);
                        out.y.push(if te == t_now { solver.y().to_vec() } else { seg.eval(te) });
                        pending.next();
                    }
                }
            }
        }
        if outcome == StepOutcome::Finished {
            break;
        }
    }
    out.steps = solver.steps();
    out.rejected_steps = solver.rejected_steps();
    Ok(out)
}
