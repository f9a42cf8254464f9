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

//! Search for schedules that spread the ensemble as fast as possible.
//!
//! The searched family generalizes Grover's iteration: query `k` rotates the
//! target phase by `φ_k` and the unitary before query `k + 1` is the phased
//! diffusion with angle `ϕ_k`. Parameters are laid out as
//! `[φ_1, …, φ_t, ϕ_1, …, ϕ_t]`; the all-`π` point is Grover. Every
//! candidate's trace is audited against the per-step recursions and the
//! envelope, not just the winner's.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{self, audit_spreads};
use crate::ensemble::{spread_series, Schedule, Stage, StageUnitary};
use crate::report::{ser_sig12, ser_sig12_vec};
use crate::state::{haar_unitary_with, stream_rng, uniform_state};
use crate::{Error, Result};

/// `t` Haar-random dense stages, each followed by a sign-flip query.
pub fn random_schedule(dim: usize, t: usize, seed: u64) -> Result<Schedule> {
    let stages = (0..t)
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let u = haar_unitary_with(dim, &mut rng)?;
            Ok(Stage::query(StageUnitary::Dense(Arc::new(u))))
        })
        .collect::<Result<Vec<_>>>()?;
    Schedule::new(dim, stages)
}

/// Member of the phased-rotation family; `params.len()` must be even.
pub fn phased_schedule(dim: usize, params: &[f64]) -> Result<Schedule> {
    if !params.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "parameter count {} is odd",
            params.len()
        )));
    }
    let t = params.len() / 2;
    let (query_phases, diffusion_angles) = params.split_at(t);
    let mut stages = Vec::with_capacity(t + 1);
    for k in 0..t {
        let unitary = if k == 0 {
            StageUnitary::Identity
        } else {
            StageUnitary::PhasedDiffusion(diffusion_angles[k - 1])
        };
        stages.push(Stage::query_with_phase(unitary, query_phases[k]));
    }
    if let Some(&last) = diffusion_angles.last() {
        stages.push(Stage::unitary_only(StageUnitary::PhasedDiffusion(last)));
    }
    Schedule::new(dim, stages)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryConfig {
    pub max_dim: usize,
    pub max_steps: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evaluations: usize,
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        AdversaryConfig {
            max_dim: 64,
            max_steps: 32,
            initial_step: PI / 8.0,
            min_step: 1e-6,
            max_evaluations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversaryResult {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: usize,
    #[serde(serialize_with = "ser_sig12")]
    pub best_spread: f64,
    #[serde(serialize_with = "ser_sig12")]
    pub envelope: f64,
    #[serde(serialize_with = "ser_sig12")]
    pub tightness: f64,
    #[serde(serialize_with = "ser_sig12_vec")]
    pub best_parameters: Vec<f64>,
    pub restarts: usize,
    pub seed: u64,
}

/// Outcome of one hill-climbing restart.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimbOutcome {
    pub params: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Best value after the start and after every accepted move.
    pub history: Vec<f64>,
}

/// Coordinate-wise hill climbing over angles.
///
/// Each sweep tries `±step` on every coordinate in turn and takes the first
/// strict improvement. A sweep with no improvement halves the step; the
/// climb stops once the step drops below `min_step` or the evaluation
/// budget is spent.
pub fn hill_climb<F>(
    start: Vec<f64>,
    config: &AdversaryConfig,
    mut objective: F,
) -> Result<ClimbOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut x = start;
    let mut fx = objective(&x)?;
    let mut evaluations = 1;
    let mut history = vec![fx];
    let mut step = config.initial_step;
    'outer: while step >= config.min_step {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                if evaluations >= config.max_evaluations {
                    break 'outer;
                }
                let mut y = x.clone();
                y[i] = (x[i] + dir * step).rem_euclid(TAU);
                let fy = objective(&y)?;
                evaluations += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    history.push(fx);
                    break;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(ClimbOutcome {
        params: x,
        value: fx,
        evaluations,
        history,
    })
}

/// Full record of a search.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryRun {
    pub result: AdversaryResult,
    /// One entry per restart, restart 0 being the Grover start.
    pub climbs: Vec<ClimbOutcome>,
    pub best_restart: usize,
}

/// Final spread of a family member, after auditing its whole trace.
pub fn audited_spread(dim: usize, params: &[f64]) -> Result<f64> {
    let schedule = phased_schedule(dim, params)?;
    let spreads = spread_series(&schedule, &uniform_state(dim)?)?;
    let audit = audit_spreads(dim, &spreads)?;
    if !audit.recursions_hold() {
        return Err(Error::InvariantViolation(format!(
            "candidate {params:?} breaks a spread recursion: {audit:?}"
        )));
    }
    Ok(*spreads.last().expect("at least the t = 0 row"))
}

pub fn maximize_spread(
    dim: usize,
    t: usize,
    restarts: usize,
    seed: u64,
) -> Result<AdversaryResult> {
    Ok(search(dim, t, restarts, seed, &AdversaryConfig::default())?.result)
}

/// Runs `restarts` climbs in parallel and keeps the best, lowest restart
/// index on ties.
pub fn search(
    dim: usize,
    t: usize,
    restarts: usize,
    seed: u64,
    config: &AdversaryConfig,
) -> Result<AdversaryRun> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if t == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }
    if dim > config.max_dim {
        return Err(Error::CapExceeded {
            what: "N",
            value: dim,
            cap: config.max_dim,
        });
    }
    if t > config.max_steps {
        return Err(Error::CapExceeded {
            what: "steps",
            value: t,
            cap: config.max_steps,
        });
    }

    let climbs = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                vec![PI; 2 * t]
            } else {
                let mut rng = stream_rng(seed, r as u64);
                (0..2 * t).map(|_| rng.random_range(0.0..TAU)).collect()
            };
            hill_climb(start, config, |p| audited_spread(dim, p))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best_restart = 0;
    for (i, c) in climbs.iter().enumerate() {
        if c.value > climbs[best_restart].value {
            best_restart = i;
        }
    }
    let best = &climbs[best_restart];
    let envelope = bounds::spread_envelope(dim, t)?;
    let result = AdversaryResult {
        n: dim,
        t,
        best_spread: best.value,
        envelope,
        tightness: if envelope > 0.0 {
            best.value / envelope
        } else {
            0.0
        },
        best_parameters: best.params.clone(),
        restarts,
        seed,
    };
    Ok(AdversaryRun {
        result,
        climbs,
        best_restart,
    })
}
