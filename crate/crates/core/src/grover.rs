// Copyright 2026 The qsearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Grover's iteration, the witness that the spread bounds are tight.
//!
//! Starting from `|s⟩`, Grover's iteration never leaves the plane spanned by
//! the target axis and the uniform superposition over the other `N - 1`
//! axes, so one target amplitude `a` and one shared off-target amplitude `b`
//! describe the state exactly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ensemble::{Schedule, Stage, StageUnitary};
use crate::state::{apply_query, uniform_state, QueryOp, StateVector};
use crate::{Error, Result};

/// `v ← (1 - factor)·⟨s|v⟩·|s⟩ - v`. With `factor = -1` this is the
/// inversion about the average.
pub(crate) fn phased_diffusion_in_place(amps: &mut [Complex64], factor: Complex64) {
    let n = amps.len() as f64;
    let mean = amps.iter().sum::<Complex64>() / n;
    let shift = (Complex64::new(1.0, 0.0) - factor) * mean;
    for a in amps.iter_mut() {
        *a = shift - *a;
    }
}

/// Inversion about the average, `2⟨s|v⟩|s⟩ - v`.
pub fn diffusion(v: &StateVector) -> StateVector {
    let mut amps = v.amps().to_vec();
    phased_diffusion_in_place(&mut amps, Complex64::new(-1.0, 0.0));
    StateVector::from_trusted(amps)
}

fn rotation_angle(dim: usize) -> f64 {
    (1.0 / (dim as f64).sqrt()).asin()
}

/// `t` Grover iterations in stage form.
///
/// Stage 1 queries the untouched start, stage `k ≥ 2` diffuses then
/// queries, and a final query-free diffusion closes the last iteration. Up
/// to that trailing rigid rotation this is `(diffusion · oracle)^t`.
pub fn grover_schedule(dim: usize, t: usize) -> Result<Schedule> {
    let mut stages = Vec::with_capacity(t + 1);
    for k in 0..t {
        let unitary = if k == 0 {
            StageUnitary::Identity
        } else {
            StageUnitary::Diffusion
        };
        stages.push(Stage::query(unitary));
    }
    stages.push(Stage::unitary_only(StageUnitary::Diffusion));
    Schedule::new(dim, stages)
}

/// Grover state restricted to its invariant plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDimState {
    /// Amplitude on the target axis.
    pub a: f64,
    /// Amplitude on each of the `N - 1` other axes.
    pub b: f64,
    pub dim: usize,
}

impl TwoDimState {
    pub fn initial(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let amp = 1.0 / (dim as f64).sqrt();
        Ok(TwoDimState {
            a: amp,
            b: if dim == 1 { 0.0 } else { amp },
            dim,
        })
    }

    /// One oracle call followed by one diffusion.
    pub fn iterate(&self) -> Self {
        if self.dim == 1 {
            // Diffusion is the identity here; only the oracle's sign remains.
            return TwoDimState {
                a: -self.a,
                ..*self
            };
        }
        let n = self.dim as f64;
        let a = -self.a;
        let mean = (a + (n - 1.0) * self.b) / n;
        TwoDimState {
            a: 2.0 * mean - a,
            b: 2.0 * mean - self.b,
            dim: self.dim,
        }
    }

    /// State after `t` iterations by repeated [`TwoDimState::iterate`].
    pub fn after(dim: usize, t: usize) -> Result<Self> {
        let mut s = Self::initial(dim)?;
        for _ in 0..t {
            s = s.iterate();
        }
        Ok(s)
    }

    /// Closed form `a = sin((2t+1)θ)`, `b = cos((2t+1)θ)/√(N-1)`.
    pub fn closed_form(dim: usize, t: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let angle = (2 * t + 1) as f64 * rotation_angle(dim);
        let b = if dim == 1 {
            0.0
        } else {
            angle.cos() / ((dim - 1) as f64).sqrt()
        };
        Ok(TwoDimState {
            a: angle.sin(),
            b,
            dim,
        })
    }

    pub fn norm_sq(&self) -> f64 {
        self.a * self.a + (self.dim as f64 - 1.0) * self.b * self.b
    }

    /// Embeds into the full space with the target on axis `target`.
    pub fn to_state(&self, target: usize) -> Result<StateVector> {
        if target >= self.dim {
            return Err(Error::TargetOutOfRange {
                target,
                dim: self.dim,
            });
        }
        let mut amps = vec![Complex64::new(self.b, 0.0); self.dim];
        amps[target] = Complex64::new(self.a, 0.0);
        StateVector::new(amps)
    }
}

/// Full `N`-dimensional Grover run: `t` rounds of sign-flip oracle on
/// `target` then diffusion, from `|s⟩`.
pub fn simulate_full(dim: usize, t: usize, target: usize) -> Result<StateVector> {
    let mut v = uniform_state(dim)?;
    let q = QueryOp::flip(target);
    for _ in 0..t {
        v = diffusion(&apply_query(&v, &q)?);
    }
    Ok(v)
}

/// Probability of measuring the target after `t` iterations,
/// `sin²((2t+1)·asin(1/√N))`.
pub fn success_probability(dim: usize, t: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if t == 0 {
        return Ok(1.0 / dim as f64);
    }
    let s = ((2 * t + 1) as f64 * rotation_angle(dim)).sin();
    Ok(s * s)
}

/// Iteration count maximizing the success probability:
/// `round(π / (4·asin(1/√N)) - 1/2)`, half-integers rounded down.
pub fn optimal_iterations(dim: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let x = PI / (4.0 * rotation_angle(dim)) - 0.5;
    let floor = x.floor();
    // N = 2 lands on an exact tie that round-off pushes just past .5.
    let t = if x - floor <= 0.5 + 1e-9 {
        floor
    } else {
        floor + 1.0
    };
    Ok(t.max(0.0) as usize)
}

/// Exact spread of the Grover ensemble after `t` queries,
/// `D(t) = 4N·sin²(t·asin(1/√N))`.
///
/// The reference never leaves `|s⟩` (diffusion fixes it) and, because
/// unitaries do not change distances, the distance of trajectory `α` to
/// the reference after query `t` equals `|G^t s - s|²` with `G` the full
/// iteration. `⟨s|G^t s⟩ = cos(2tθ)`, so each trajectory contributes
/// `2 - 2cos(2tθ) = 4sin²(tθ)`.
pub fn grover_spread_exact(dim: usize, t: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let s = (t as f64 * rotation_angle(dim)).sin();
    Ok(4.0 * dim as f64 * s * s)
}
