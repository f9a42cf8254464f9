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

//! Invariant suites behind `qsearch selfcheck`.
//!
//! Each suite reports the largest excess of its inequality (left side minus
//! right side) and passes when that stays within the suite's tolerance.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::adversary::{maximize_spread, random_schedule};
use crate::bounds::{
    audit_trace, component_gap, lemma_worst_pair, optimal_reference, spread_about, survey_lemma,
    theorem1_min_spread, TraceAudit,
};
use crate::ensemble::{run_schedule_with, Ensemble, Fault, SimConfig, Stage, StageUnitary};
use crate::grover::{grover_schedule, grover_spread_exact, simulate_full, TwoDimState};
use crate::state::{
    apply_query, apply_unitary, distance_sq, haar_unitary_with, inner, stream_rng, uniform_state,
    QueryOp, StateVector, DRIFT_TOL,
};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SelfcheckConfig {
    pub seed: u64,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed `lhs - rhs`.
    pub max_excess: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    fn new(name: &'static str, max_excess: f64, tolerance: f64) -> Self {
        SuiteResult {
            name,
            passed: max_excess <= tolerance,
            max_excess,
            tolerance,
        }
    }

    fn failed(name: &'static str, tolerance: f64) -> Self {
        SuiteResult {
            name,
            passed: false,
            max_excess: f64::INFINITY,
            tolerance,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<28} max_excess={:.3e} tol={:.0e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_excess,
            self.tolerance
        )
    }
}

fn suite(name: &'static str, tolerance: f64, body: impl FnOnce() -> Result<f64>) -> SuiteResult {
    match body() {
        Ok(excess) => SuiteResult::new(name, excess, tolerance),
        Err(_) => SuiteResult::failed(name, tolerance),
    }
}

fn sim_config(cfg: &SelfcheckConfig) -> SimConfig {
    SimConfig {
        fault: cfg.fault,
        ..SimConfig::default()
    }
}

fn norm_preservation(seed: u64) -> Result<f64> {
    let mut rng = stream_rng(seed, 100);
    let mut worst = 0.0f64;
    for n in 1..=16 {
        let u = haar_unitary_with(n, &mut rng)?;
        let mut v = StateVector::random(n, &mut rng)?;
        for k in 0..20 {
            v = apply_unitary(&u, &v)?;
            worst = worst.max((v.norm_sq().sqrt() - 1.0).abs());
            v = apply_query(&v, &QueryOp::new(k % n, 0.37 * k as f64)?)?;
            worst = worst.max((v.norm_sq().sqrt() - 1.0).abs());
        }
    }
    Ok(worst)
}

fn bracket_identity(seed: u64) -> Result<f64> {
    let mut rng = stream_rng(seed, 101);
    let mut worst = 0.0f64;
    for n in 1..=16 {
        for _ in 0..20 {
            let u = StateVector::random(n, &mut rng)?;
            let v = StateVector::random(n, &mut rng)?;
            let lhs = distance_sq(&u, &v)?;
            let rhs = u.norm_sq() + v.norm_sq() - 2.0 * inner(&u, &v)?.re;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// Spread after every stage of query-free schedules; must stay at zero.
fn no_query_invariance(cfg: &SelfcheckConfig) -> Result<f64> {
    let mut rng = stream_rng(cfg.seed, 102);
    let mut worst = 0.0f64;
    for n in [2usize, 3, 4, 8, 16] {
        let start = StateVector::random(n, &mut rng)?;
        let mut e = Ensemble::with_config(n, &start, sim_config(cfg))?;
        let stages = [
            StageUnitary::Dense(Arc::new(haar_unitary_with(n, &mut rng)?)),
            StageUnitary::Diffusion,
            StageUnitary::PhasedDiffusion(1.1),
            StageUnitary::Identity,
            StageUnitary::Dense(Arc::new(haar_unitary_with(n, &mut rng)?)),
        ];
        for u in stages {
            e = e.step(&Stage::unitary_only(u))?;
            worst = worst.max(e.spread());
        }
    }
    Ok(worst)
}

fn random_corpus_audit(cfg: &SelfcheckConfig, schedules: u64) -> Result<TraceAudit> {
    let mut audit: Option<TraceAudit> = None;
    for seed in 0..schedules {
        let n = [2usize, 4, 8][(seed % 3) as usize];
        let s = random_schedule(n, 6, cfg.seed.wrapping_mul(1_000_003).wrapping_add(seed))?;
        let trace = run_schedule_with(&s, &uniform_state(n)?, sim_config(cfg))?;
        let a = audit_trace(&trace)?;
        audit = Some(match audit {
            Some(prev) => prev.merge(a),
            None => a,
        });
    }
    Ok(audit.expect("at least one schedule"))
}

/// `√Δ_α` grows by at most `2|⟨α|ψ_0⟩|` across one query.
fn per_trajectory_growth(cfg: &SelfcheckConfig) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for seed in 0..60u64 {
        let n = [2usize, 4, 8][(seed % 3) as usize];
        let s = random_schedule(n, 5, cfg.seed ^ (seed << 20))?;
        let mut e = Ensemble::with_config(n, &uniform_state(n)?, sim_config(cfg))?;
        let mut before = e.deviations();
        for stage in s.stages() {
            e = e.step(stage)?;
            let after = e.deviations();
            for alpha in 0..n {
                let b = e.reference().amp(alpha).norm();
                worst = worst.max(after[alpha].sqrt() - before[alpha].sqrt() - 2.0 * b);
            }
            before = after;
        }
    }
    Ok(worst)
}

fn theorem1_reference(seed: u64) -> Result<f64> {
    let mut rng = stream_rng(seed, 103);
    let mut worst = 0.0f64;
    for n in [2usize, 4, 16] {
        let basis: Vec<StateVector> = (0..n)
            .map(|i| StateVector::basis(n, i))
            .collect::<Result<_>>()?;
        let best = spread_about(&basis, &optimal_reference(&basis)?)?;
        worst = worst.max((best - theorem1_min_spread(n)?).abs());
        for _ in 0..200 {
            let r = StateVector::random(n, &mut rng)?;
            worst = worst.max(best - spread_about(&basis, &r)?);
        }
    }
    Ok(worst)
}

fn grover_exact_spread(cfg: &SelfcheckConfig) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [1usize, 2, 3, 4, 7, 16, 32] {
        let s = grover_schedule(n, 12)?;
        let trace = run_schedule_with(&s, &uniform_state(n)?, sim_config(cfg))?;
        for row in &trace.rows {
            worst = worst.max((row.spread - grover_spread_exact(n, row.t)?).abs());
        }
    }
    Ok(worst)
}

fn grover_two_dim(_: &SelfcheckConfig) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [1usize, 2, 5, 16, 64] {
        let mut two = TwoDimState::initial(n)?;
        for t in 0..=20 {
            let full = simulate_full(n, t, n - 1)?;
            worst = worst.max(distance_sq(&full, &two.to_state(n - 1)?)?.sqrt());
            two = two.iterate();
        }
    }
    Ok(worst)
}

fn lemma(seed: u64) -> Result<f64> {
    let survey = survey_lemma(10_000, seed, false);
    let mut worst = survey.max_excess;
    for k in 0..100 {
        let theta = PI / 2.0 * (k as f64 / 99.0);
        let (a, b) = lemma_worst_pair(theta)?;
        worst = worst.max(component_gap(&a, &b)?.excess().abs());
    }
    Ok(worst)
}

fn adversary_dominance(seed: u64) -> Result<f64> {
    let r = maximize_spread(8, 2, 4, seed)?;
    let grover = grover_spread_exact(8, 2)?;
    Ok((r.best_spread - r.envelope).max(grover - r.best_spread))
}

/// Runs every suite in a fixed order.
pub fn run_selfcheck(cfg: &SelfcheckConfig) -> Vec<SuiteResult> {
    let seed = cfg.seed;
    let corpus = random_corpus_audit(cfg, 300);
    let from_corpus = |name, tol, f: fn(&TraceAudit) -> f64| match &corpus {
        Ok(a) => SuiteResult::new(name, f(a), tol),
        Err(_) => SuiteResult::failed(name, tol),
    };
    vec![
        suite("norm-preservation", DRIFT_TOL, || norm_preservation(seed)),
        suite("bracket-identity", DRIFT_TOL, || bracket_identity(seed)),
        suite("no-query-invariance", DRIFT_TOL, || {
            no_query_invariance(cfg)
        }),
        suite("per-trajectory-growth", 1e-9, || per_trajectory_growth(cfg)),
        from_corpus("quadratic-step-recursion", 1e-9, |a| a.thm2_step),
        from_corpus("quadratic-total-bound", 1e-6, |a| a.thm2_total),
        from_corpus("sine-step-recursion", 1e-9, |a| a.thm3_step),
        from_corpus("envelope-dominance", 1e-9, |a| a.envelope),
        from_corpus("sine-closed-form-with-slack", 1e-6, |a| a.closed_form),
        from_corpus("spread-sum-consistency", 1e-9, |a| {
            a.sum_mismatch.max(a.deviation_range)
        }),
        suite("resolvability-reference", 1e-9, || theorem1_reference(seed)),
        suite("grover-exact-spread", 1e-9, || grover_exact_spread(cfg)),
        suite("grover-2d-agreement", 1e-9, || grover_two_dim(cfg)),
        suite("component-gap-lemma", 1e-9, || lemma(seed)),
        suite("adversary-dominance", 1e-6, || adversary_dominance(seed)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let results = run_selfcheck(&SelfcheckConfig::default());
        for r in &results {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn reference_query_fault_is_caught() {
        let cfg = SelfcheckConfig {
            seed: 0,
            fault: Some(Fault::QueryOnReference),
        };
        let results = run_selfcheck(&cfg);
        let nq = results
            .iter()
            .find(|r| r.name == "no-query-invariance")
            .unwrap();
        assert!(!nq.passed);
        assert!(
            results
                .iter()
                .find(|r| r.name == "norm-preservation")
                .unwrap()
                .passed
        );
    }
}
