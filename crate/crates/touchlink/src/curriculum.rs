//! Teacher-weight schedule and the curriculum representation mix.
//!
//! During pretraining the vision tower acts as a teacher for the touch
//! tower: the step-`i` representation is `beta_i * x_v + (1 - beta_i) * x_t`
//! with `beta_i` decaying linearly from `beta_start` to `beta_min` over the
//! total step budget. Disabling the schedule reproduces the no-curriculum
//! ablation: the mix degenerates to the plain touch representation.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CurriculumError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("step {step} out of range (total steps {total})")]
    StepOutOfRange { step: usize, total: usize },
    #[error("beta {0} outside [0, 1]")]
    BetaOutOfRange(f64),
    #[error("dimension mismatch: vision {vision}, touch {touch}")]
    DimensionMismatch { vision: usize, touch: usize },
}

/// Linear decay of the teacher weight over the training run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurriculumSchedule {
    /// Initial teacher weight.
    pub beta_start: f64,
    /// Ultimate weight reached at the final step.
    pub beta_min: f64,
    /// Total number of training steps the decay spans.
    pub total_steps: usize,
    /// `false` switches the teacher off entirely (ablation mode).
    pub enabled: bool,
}

impl CurriculumSchedule {
    pub fn new(
        beta_start: f64,
        beta_min: f64,
        total_steps: usize,
        enabled: bool,
    ) -> Result<Self, CurriculumError> {
        if !(0.0..=1.0).contains(&beta_min)
            || !(0.0..=1.0).contains(&beta_start)
            || beta_min > beta_start
        {
            return Err(CurriculumError::InvalidSchedule(format!(
                "need 0 <= beta_min <= beta_start <= 1, got beta_start={beta_start}, beta_min={beta_min}"
            )));
        }
        if total_steps == 0 {
            return Err(CurriculumError::InvalidSchedule("total_steps must be >= 1".into()));
        }
        Ok(Self { beta_start, beta_min, total_steps, enabled })
    }

    /// Disabled schedule used by the no-curriculum ablation.
    pub fn disabled(total_steps: usize) -> Self {
        Self { beta_start: 0.0, beta_min: 0.0, total_steps: total_steps.max(1), enabled: false }
    }

    /// Teacher weight at step `i`.
    ///
    /// The subtraction form `beta_start - (i/N)(beta_start - beta_min)` is
    /// monotone non-increasing under IEEE rounding (division by a positive
    /// constant, multiplication by a non-negative constant, and subtraction
    /// from a constant all preserve order), which the schedule tests check
    /// step by step.
    pub fn beta_at_step(&self, step: usize) -> Result<f64, CurriculumError> {
        if step > self.total_steps {
            return Err(CurriculumError::StepOutOfRange { step, total: self.total_steps });
        }
        if !self.enabled {
            return Ok(0.0);
        }
        let t = step as f64 / self.total_steps as f64;
        Ok(self.beta_start - t * (self.beta_start - self.beta_min))
    }
}

fn check_beta(beta: f64) -> Result<(), CurriculumError> {
    if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
        return Err(CurriculumError::BetaOutOfRange(beta));
    }
    Ok(())
}

/// `beta * x_v + (1 - beta) * x_t` for one embedding pair.
pub fn curriculum_mix(
    x_v: ArrayView1<'_, f64>,
    x_t: ArrayView1<'_, f64>,
    beta: f64,
) -> Result<Array1<f64>, CurriculumError> {
    check_beta(beta)?;
    if x_v.len() != x_t.len() {
        return Err(CurriculumError::DimensionMismatch { vision: x_v.len(), touch: x_t.len() });
    }
    Ok(&x_v * beta + &(&x_t * (1.0 - beta)))
}

/// Batched mix: one beta applied to every row of the step's batch.
pub fn curriculum_mix_batch(
    x_v: ArrayView2<'_, f64>,
    x_t: ArrayView2<'_, f64>,
    beta: f64,
) -> Result<Array2<f64>, CurriculumError> {
    check_beta(beta)?;
    if x_v.dim() != x_t.dim() {
        return Err(CurriculumError::DimensionMismatch { vision: x_v.ncols(), touch: x_t.ncols() });
    }
    Ok(&x_v * beta + &(&x_t * (1.0 - beta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn schedule(beta_start: f64, beta_min: f64, n: usize) -> CurriculumSchedule {
        CurriculumSchedule::new(beta_start, beta_min, n, true).unwrap()
    }

    #[test]
    fn decay_endpoints_and_midpoint() {
        let s = schedule(0.9, 0.0, 100);
        assert_eq!(s.beta_at_step(0).unwrap(), 0.9);
        assert_eq!(s.beta_at_step(100).unwrap(), 0.0);
        assert!((s.beta_at_step(50).unwrap() - 0.45).abs() < 1e-15);
    }

    #[test]
    fn step_out_of_range_is_an_error() {
        let s = schedule(0.9, 0.0, 10);
        assert_eq!(
            s.beta_at_step(11),
            Err(CurriculumError::StepOutOfRange { step: 11, total: 10 })
        );
    }

    #[test]
    fn disabled_schedule_returns_zero_everywhere() {
        let s = CurriculumSchedule::disabled(50);
        for i in 0..=50 {
            assert_eq!(s.beta_at_step(i).unwrap(), 0.0);
        }
    }

    #[test]
    fn invalid_schedules_are_rejected() {
        assert!(CurriculumSchedule::new(0.2, 0.5, 10, true).is_err());
        assert!(CurriculumSchedule::new(1.2, 0.0, 10, true).is_err());
        assert!(CurriculumSchedule::new(0.9, -0.1, 10, true).is_err());
        assert!(CurriculumSchedule::new(0.9, 0.0, 0, true).is_err());
    }

    #[test]
    fn mix_endpoints_are_exact() {
        let xv = array![1.0, -2.0, 3.5];
        let xt = array![0.5, 4.0, -1.0];
        assert_eq!(curriculum_mix(xv.view(), xt.view(), 1.0).unwrap(), xv);
        assert_eq!(curriculum_mix(xv.view(), xt.view(), 0.0).unwrap(), xt);
    }

    #[test]
    fn mix_half_and_half() {
        let out = curriculum_mix(array![1.0, 0.0].view(), array![0.0, 1.0].view(), 0.5).unwrap();
        assert_eq!(out, array![0.5, 0.5]);
    }

    #[test]
    fn mix_rejects_mismatched_dims_and_bad_beta() {
        let a = array![1.0, 2.0];
        let b = array![1.0, 2.0, 3.0];
        assert!(matches!(
            curriculum_mix(a.view(), b.view(), 0.5),
            Err(CurriculumError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            curriculum_mix(a.view(), a.view(), 1.5),
            Err(CurriculumError::BetaOutOfRange(_))
        ));
    }
}
