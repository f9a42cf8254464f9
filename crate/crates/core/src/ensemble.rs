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

//! The `N + 1` trajectory ensemble.
//!
//! Trajectory `α` is the state of a search whose hidden target is `α`; the
//! reference evolves under the same unitaries with every query omitted. The
//! deviation `Δ_α(t)` is the squared distance between trajectory `α` and the
//! reference after `t` queries, and the spread `D(t)` is their sum.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bounds;
use crate::grover::phased_diffusion_in_place;
use crate::state::{distance_sq_unchecked, phase_factor, StateVector, Unitary};
use crate::{Error, Result};

/// Default cap on `N` for full ensemble simulation.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Slack allowed on `D` outside `[0, 4N]` before [`theta_of_spread`] rejects it.
pub const SPREAD_DOMAIN_TOL: f64 = 1e-9;

/// Below this dimension trajectories are stepped on the calling thread.
const PARALLEL_MIN_DIM: usize = 256;

/// Non-query part of a stage.
#[derive(Debug, Clone, PartialEq)]
pub enum StageUnitary {
    Identity,
    /// Inversion about the average, `2|s⟩⟨s| - I`.
    Diffusion,
    /// `(1 - e^{iϕ})|s⟩⟨s| - I`; equals `Diffusion` at `ϕ = π`.
    PhasedDiffusion(f64),
    Dense(Arc<Unitary>),
}

impl StageUnitary {
    fn dim(&self) -> Option<usize> {
        match self {
            StageUnitary::Dense(u) => Some(u.dim()),
            _ => None,
        }
    }

    /// Applies the unitary in place; `scratch` must have the vector's length.
    fn apply_in_place(&self, amps: &mut [Complex64], scratch: &mut [Complex64]) {
        match self {
            StageUnitary::Identity => {}
            StageUnitary::Diffusion => phased_diffusion_in_place(amps, Complex64::new(-1.0, 0.0)),
            StageUnitary::PhasedDiffusion(phi) => {
                phased_diffusion_in_place(amps, phase_factor(*phi))
            }
            StageUnitary::Dense(u) => {
                u.apply_into(amps, scratch);
                amps.copy_from_slice(scratch);
            }
        }
    }
}

/// A unitary followed, optionally, by one query.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub unitary: StageUnitary,
    pub query_after: bool,
    pub query_phase: f64,
}

impl Stage {
    /// Unitary then a sign-flip query.
    pub fn query(unitary: StageUnitary) -> Self {
        Stage {
            unitary,
            query_after: true,
            query_phase: PI,
        }
    }

    pub fn query_with_phase(unitary: StageUnitary, phase: f64) -> Self {
        Stage {
            unitary,
            query_after: true,
            query_phase: phase,
        }
    }

    pub fn unitary_only(unitary: StageUnitary) -> Self {
        Stage {
            unitary,
            query_after: false,
            query_phase: PI,
        }
    }
}

/// Interleaved unitaries and queries acting on an `N`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    dim: usize,
    stages: Vec<Stage>,
}

impl Schedule {
    pub fn new(dim: usize, stages: Vec<Stage>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for stage in &stages {
            if let Some(d) = stage.unitary.dim() {
                if d != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: d,
                    });
                }
            }
            if !stage.query_phase.is_finite() {
                return Err(Error::NonFinitePhase);
            }
            if let StageUnitary::PhasedDiffusion(phi) = stage.unitary {
                if !phi.is_finite() {
                    return Err(Error::NonFinitePhase);
                }
            }
        }
        Ok(Schedule { dim, stages })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn query_count(&self) -> usize {
        self.stages.iter().filter(|s| s.query_after).count()
    }
}

/// Deliberate simulation bugs, used to prove that the self-check notices them.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The query phase also lands on the reference's axis 0, on every stage.
    QueryOnReference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub max_dim: usize,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            max_dim: DEFAULT_MAX_DIM,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    reference: StateVector,
    trajectories: Vec<StateVector>,
    queries_applied: usize,
    config: SimConfig,
}

/// All `N + 1` vectors start at `start`.
pub fn init_ensemble(dim: usize, start: &StateVector) -> Result<Ensemble> {
    Ensemble::with_config(dim, start, SimConfig::default())
}

impl Ensemble {
    pub fn with_config(dim: usize, start: &StateVector, config: SimConfig) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if start.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: start.dim(),
            });
        }
        if dim > config.max_dim {
            return Err(Error::CapExceeded {
                what: "ensemble dimension",
                value: dim,
                cap: config.max_dim,
            });
        }
        Ok(Ensemble {
            reference: start.clone(),
            trajectories: vec![start.clone(); dim],
            queries_applied: 0,
            config,
        })
    }

    pub fn dim(&self) -> usize {
        self.reference.dim()
    }

    pub fn reference(&self) -> &StateVector {
        &self.reference
    }

    pub fn trajectories(&self) -> &[StateVector] {
        &self.trajectories
    }

    pub fn queries_applied(&self) -> usize {
        self.queries_applied
    }

    /// Returns the ensemble after one stage.
    pub fn step(&self, stage: &Stage) -> Result<Ensemble> {
        let mut next = self.clone();
        next.step_in_place(stage)?;
        Ok(next)
    }

    pub(crate) fn step_in_place(&mut self, stage: &Stage) -> Result<()> {
        let n = self.dim();
        if let Some(d) = stage.unitary.dim() {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d,
                });
            }
        }
        if !stage.query_phase.is_finite() {
            return Err(Error::NonFinitePhase);
        }
        let factor = phase_factor(stage.query_phase);

        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        stage
            .unitary
            .apply_in_place(self.reference.amps_mut(), &mut scratch);
        if self.config.fault == Some(Fault::QueryOnReference) {
            self.reference.amps_mut()[0] *= factor;
        }

        let update = |alpha: usize, traj: &mut StateVector, scratch: &mut [Complex64]| {
            stage.unitary.apply_in_place(traj.amps_mut(), scratch);
            if stage.query_after {
                traj.amps_mut()[alpha] *= factor;
            }
        };
        if n >= PARALLEL_MIN_DIM {
            self.trajectories.par_iter_mut().enumerate().for_each_init(
                || vec![Complex64::new(0.0, 0.0); n],
                |scratch, (alpha, traj)| update(alpha, traj, scratch),
            );
        } else {
            for (alpha, traj) in self.trajectories.iter_mut().enumerate() {
                update(alpha, traj, &mut scratch);
            }
        }
        if stage.query_after {
            self.queries_applied += 1;
        }
        Ok(())
    }

    /// `Δ_α` for every `α`, in ascending order.
    pub fn deviations(&self) -> Vec<f64> {
        let r = self.reference.amps();
        if self.dim() >= PARALLEL_MIN_DIM {
            self.trajectories
                .par_iter()
                .map(|v| distance_sq_unchecked(v.amps(), r))
                .collect()
        } else {
            self.trajectories
                .iter()
                .map(|v| distance_sq_unchecked(v.amps(), r))
                .collect()
        }
    }

    /// `D = Σ_α Δ_α`, summed in ascending `α`.
    pub fn spread(&self) -> f64 {
        self.deviations().iter().sum()
    }
}

/// `D` of an ensemble; see [`Ensemble::spread`].
pub fn spread(e: &Ensemble) -> f64 {
    e.spread()
}

/// Ensemble angle `Θ = arccos(1 - D / 2N)`.
pub fn theta_of_spread(spread: f64, dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let n = dim as f64;
    let hi = 4.0 * n;
    if !(spread >= -SPREAD_DOMAIN_TOL && spread <= hi + SPREAD_DOMAIN_TOL) {
        return Err(Error::Domain {
            what: "spread",
            value: spread,
            lo: 0.0,
            hi,
        });
    }
    Ok((1.0 - spread / (2.0 * n)).clamp(-1.0, 1.0).acos())
}

/// Per-trajectory angle `θ_α = arccos(1 - Δ_α / 2)`.
pub fn theta_of_deviation(deviation: f64) -> f64 {
    // Chord form; acos(1 - d/2) loses half the digits for nearby vectors.
    2.0 * (deviation.max(0.0).sqrt() / 2.0).min(1.0).asin()
}

/// One trace row, recorded after `t` queries.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub deviations: Vec<f64>,
    pub spread: f64,
    pub thetas: Vec<f64>,
    pub theta: f64,
    pub bound_thm2: f64,
    pub bound_thm3: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadTrace {
    pub dim: usize,
    pub rows: Vec<TraceRow>,
}

impl SpreadTrace {
    pub fn final_spread(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.spread)
    }

    pub fn spreads(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.spread).collect()
    }
}

fn trace_row(e: &Ensemble, envelope: f64) -> Result<TraceRow> {
    let n = e.dim();
    let t = e.queries_applied();
    let deviations = e.deviations();
    let spread: f64 = deviations.iter().sum();
    Ok(TraceRow {
        t,
        thetas: deviations.iter().map(|&d| theta_of_deviation(d)).collect(),
        theta: theta_of_spread(spread, n)?,
        deviations,
        spread,
        bound_thm2: bounds::theorem2_bound(t),
        bound_thm3: bounds::theorem3_bound_saturated(n, t as f64),
        envelope,
    })
}

/// Runs `schedule` from `start`, recording the `t = 0` row and one row after
/// every query stage.
pub fn run_schedule(schedule: &Schedule, start: &StateVector) -> Result<SpreadTrace> {
    run_schedule_with(schedule, start, SimConfig::default())
}

pub fn run_schedule_with(
    schedule: &Schedule,
    start: &StateVector,
    config: SimConfig,
) -> Result<SpreadTrace> {
    let n = schedule.dim();
    let mut ensemble = Ensemble::with_config(n, start, config)?;
    let envelope = bounds::envelope_sequence(n, schedule.query_count());
    let mut rows = vec![trace_row(&ensemble, envelope[0])?];
    for stage in schedule.stages() {
        ensemble.step_in_place(stage)?;
        if stage.query_after {
            let t = ensemble.queries_applied();
            rows.push(trace_row(&ensemble, envelope[t])?);
        }
    }
    Ok(SpreadTrace { dim: n, rows })
}

/// Spread after every query stage, without the per-row bookkeeping.
pub(crate) fn spread_series(schedule: &Schedule, start: &StateVector) -> Result<Vec<f64>> {
    let mut ensemble = Ensemble::with_config(schedule.dim(), start, SimConfig::default())?;
    let mut out = Vec::with_capacity(schedule.query_count() + 1);
    out.push(ensemble.spread());
    for stage in schedule.stages() {
        ensemble.step_in_place(stage)?;
        if stage.query_after {
            out.push(ensemble.spread());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{haar_unitary, stream_rng, uniform_state};

    #[test]
    fn fresh_ensemble_has_zero_spread() {
        let e = init_ensemble(4, &uniform_state(4).unwrap()).unwrap();
        assert_eq!(e.spread(), 0.0);
        assert!(e.deviations().iter().all(|&d| d == 0.0));

        let e0 = StateVector::basis(2, 0).unwrap();
        let e = init_ensemble(2, &e0).unwrap();
        assert_eq!(e.reference(), &e0);
        assert!(e.trajectories().iter().all(|v| v == &e0));
        assert_eq!(e.trajectories().len(), 2);

        assert!(init_ensemble(3, &e0).is_err());
    }

    #[test]
    fn single_flip_from_uniform() {
        for n in [2usize, 4, 7, 32] {
            let e = init_ensemble(n, &uniform_state(n).unwrap()).unwrap();
            let e = e.step(&Stage::query(StageUnitary::Identity)).unwrap();
            assert_eq!(e.queries_applied(), 1);
            for d in e.deviations() {
                assert!((d - 4.0 / n as f64).abs() < 1e-12);
            }
            assert!((e.spread() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_phase_queries_do_nothing() {
        let e = init_ensemble(4, &uniform_state(4).unwrap()).unwrap();
        let e = e.step(&Stage::query(StageUnitary::Identity)).unwrap();
        let before = e.spread();
        let idle = Stage::query_with_phase(StageUnitary::Identity, 0.0);
        let e2 = e.step(&idle).unwrap().step(&idle).unwrap();
        assert_eq!(e2.spread(), before);
        assert_eq!(e2.queries_applied(), 3);
    }

    #[test]
    fn unitary_stage_keeps_spread() {
        let n = 6;
        let mut rng = stream_rng(5, 0);
        let start = StateVector::random(n, &mut rng).unwrap();
        let e = init_ensemble(n, &start).unwrap();
        let e = e
            .step(&Stage::query(StageUnitary::Dense(Arc::new(
                haar_unitary(n, 1).unwrap(),
            ))))
            .unwrap();
        let before = e.spread();
        for u in [
            StageUnitary::Diffusion,
            StageUnitary::PhasedDiffusion(0.3),
            StageUnitary::Dense(Arc::new(haar_unitary(n, 2).unwrap())),
        ] {
            let after = e.step(&Stage::unitary_only(u)).unwrap().spread();
            assert!((after - before).abs() < 1e-12);
        }
    }

    #[test]
    fn negated_reference_spread() {
        // All vectors e0, reference replaced by -e0: each Δ = 4, D = 4N.
        let n = 5;
        let e0 = StateVector::basis(n, 0).unwrap();
        let mut e = init_ensemble(n, &e0).unwrap();
        e.reference = e0.negated();
        assert_eq!(e.spread(), 4.0 * n as f64);
    }

    #[test]
    fn theta_of_spread_values() {
        assert_eq!(theta_of_spread(0.0, 3).unwrap(), 0.0);
        assert!((theta_of_spread(8.0, 4).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((theta_of_spread(16.0, 4).unwrap() - PI).abs() < 1e-15);
        assert_eq!(theta_of_spread(16.0 + 1e-10, 4).unwrap(), PI);
        assert!(theta_of_spread(16.1, 4).is_err());
        assert!(theta_of_spread(-1e-6, 4).is_err());
    }

    #[test]
    fn schedule_validation() {
        let u = Arc::new(haar_unitary(3, 0).unwrap());
        assert!(Schedule::new(4, vec![Stage::query(StageUnitary::Dense(u))]).is_err());
        assert!(Schedule::new(
            2,
            vec![Stage::query_with_phase(StageUnitary::Identity, f64::NAN)]
        )
        .is_err());
        let s = Schedule::new(
            2,
            vec![
                Stage::query(StageUnitary::Identity),
                Stage::unitary_only(StageUnitary::Diffusion),
            ],
        )
        .unwrap();
        assert_eq!(s.query_count(), 1);
    }

    #[test]
    fn trace_rows_follow_queries() {
        let s = Schedule::new(4, vec![Stage::unitary_only(StageUnitary::Diffusion)]).unwrap();
        let trace = run_schedule(&s, &uniform_state(4).unwrap()).unwrap();
        assert_eq!(trace.rows.len(), 1);
        assert_eq!(trace.rows[0].spread, 0.0);

        let s = Schedule::new(
            4,
            vec![
                Stage::query(StageUnitary::Identity),
                Stage::unitary_only(StageUnitary::Diffusion),
                Stage::query(StageUnitary::Identity),
            ],
        )
        .unwrap();
        let trace = run_schedule(&s, &uniform_state(4).unwrap()).unwrap();
        assert_eq!(
            trace.rows.iter().map(|r| r.t).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        let r1 = &trace.rows[1];
        assert!((r1.spread - 4.0).abs() < 1e-12);
        assert!((r1.spread - r1.deviations.iter().sum::<f64>()).abs() < 1e-9);
        assert_eq!(r1.bound_thm2, 4.0);
        assert_eq!(r1.envelope, 4.0);
        assert!((r1.theta - (1.0f64 - 4.0 / 8.0).acos()).abs() < 1e-12);
    }

    #[test]
    fn dimension_cap() {
        let cfg = SimConfig {
            max_dim: 8,
            fault: None,
        };
        assert!(matches!(
            Ensemble::with_config(9, &uniform_state(9).unwrap(), cfg),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn parallel_and_serial_paths_agree() {
        // Above the parallel threshold the result must not depend on the pool.
        let n = PARALLEL_MIN_DIM;
        let start = uniform_state(n).unwrap();
        let stages = vec![
            Stage::query(StageUnitary::Identity),
            Stage::query(StageUnitary::Diffusion),
        ];
        let s = Schedule::new(n, stages).unwrap();
        let a = run_schedule(&s, &start).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| run_schedule(&s, &start).unwrap());
        assert_eq!(a, b);
    }
}
