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

//! Quantitative checks on ensemble spread.
//!
//! * Resolvability: `N` orthonormal final states have spread at least
//!   `2N - 2√N` about any reference.
//! * Quadratic bound: one query grows `√D` by at most 2, so `D(t) ≤ 4t²`.
//! * Sine bound: the sharper step `D' ≤ D + 4√N·sin Θ + 4` with
//!   `Θ = arccos(1 - D/2N)`, iterated into an envelope, and its closed form
//!   `4N·sin²(t/√N)`.
//! * Component-gap lemma: unit vectors with non-negative components at
//!   angle `Θ` differ by at most `sin Θ` in any single component.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::ensemble::{theta_of_deviation, theta_of_spread, SpreadTrace};
use crate::grover;
use crate::report::ser_sig12;
use crate::state::{distance_sq, distance_sq_unchecked, inner, stream_rng, StateVector};
use crate::{Error, Result};

/// Absolute tolerance used by every threshold comparison.
pub const BOUND_TOL: f64 = 1e-9;

fn check_dim(dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    Ok(dim as f64)
}

/// Smallest spread of `N` orthonormal vectors about any reference,
/// `2N - 2√N`.
pub fn theorem1_min_spread(dim: usize) -> Result<f64> {
    let n = check_dim(dim)?;
    Ok(2.0 * n - 2.0 * n.sqrt())
}

/// `Σ_α |v_α - reference|²`.
pub fn spread_about(vectors: &[StateVector], reference: &StateVector) -> Result<f64> {
    vectors.iter().map(|v| distance_sq(v, reference)).sum()
}

/// Largest `|⟨u_i|u_j⟩ - δ_ij|` over all pairs.
pub fn orthonormality_deviation(vectors: &[StateVector]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, u) in vectors.iter().enumerate() {
        for v in &vectors[i..] {
            let mut g = inner(u, v)?;
            if std::ptr::eq(u, v) {
                g -= 1.0;
            }
            worst = worst.max(g.norm());
        }
    }
    Ok(worst)
}

/// The reference minimizing [`spread_about`]: `Σ_α φ_α / √N`.
///
/// In the frame of the `φ_α` the spread is `2N - 2·Re Σ_α ⟨φ_α|φ_0⟩`,
/// which under `Σ|⟨φ_α|φ_0⟩|² ≤ 1` peaks when every overlap is `1/√N`.
pub fn optimal_reference(vectors: &[StateVector]) -> Result<StateVector> {
    let first = vectors.first().ok_or(Error::InvalidDimension(0))?;
    let dim = first.dim();
    let deviation = orthonormality_deviation(vectors)?;
    if deviation > BOUND_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    let scale = 1.0 / (vectors.len() as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    for v in vectors {
        for (a, x) in amps.iter_mut().zip(v.amps()) {
            *a += x * scale;
        }
    }
    StateVector::normalized(amps)
}

/// `4t²`.
pub fn theorem2_bound(t: usize) -> f64 {
    let t = t as f64;
    4.0 * t * t
}

/// Upper end of the window in which the sine closed form applies.
pub fn theorem3_window(dim: usize) -> f64 {
    PI / 2.0 * (dim as f64).sqrt()
}

/// `4N·sin²(t/√N)` for `0 ≤ t ≤ (π/2)·√N`.
pub fn theorem3_bound(dim: usize, t: f64) -> Result<f64> {
    let n = check_dim(dim)?;
    let hi = theorem3_window(dim);
    if !(t >= 0.0 && t <= hi * (1.0 + 1e-12)) {
        return Err(Error::Domain {
            what: "t",
            value: t,
            lo: 0.0,
            hi,
        });
    }
    let s = (t / n.sqrt()).min(PI / 2.0).sin();
    Ok(4.0 * n * s * s)
}

/// [`theorem3_bound`] continued past its window at the diameter value `4N`.
pub fn theorem3_bound_saturated(dim: usize, t: f64) -> f64 {
    let n = dim as f64;
    let s = (t.max(0.0) / n.sqrt()).min(PI / 2.0).sin();
    4.0 * n * s * s
}

fn check_spread_value(what: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::Domain {
            what,
            value,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    Ok(())
}

/// `√D_next - √D_prev - 2`; non-positive when the quadratic step holds.
pub fn thm2_step_excess(prev: f64, next: f64) -> Result<f64> {
    check_spread_value("previous spread", prev)?;
    check_spread_value("next spread", next)?;
    Ok(next.sqrt() - prev.sqrt() - 2.0)
}

/// `√D_next ≤ √D_prev + 2` within [`BOUND_TOL`].
pub fn check_step_thm2(prev: f64, next: f64) -> Result<bool> {
    Ok(thm2_step_excess(prev, next)? <= BOUND_TOL)
}

/// Largest spread one query can reach from `prev`:
/// `prev + 4√N·sin Θ(prev) + 4`.
pub fn thm3_step_limit(prev: f64, dim: usize) -> Result<f64> {
    let n = check_dim(dim)?;
    let theta = theta_of_spread(prev, dim)?;
    Ok(prev + 4.0 * n.sqrt() * theta.sin() + 4.0)
}

/// `D_next - thm3_step_limit(D_prev)`; non-positive when the sine step holds.
pub fn thm3_step_excess(prev: f64, next: f64, dim: usize) -> Result<f64> {
    check_spread_value("next spread", next)?;
    Ok(next - thm3_step_limit(prev, dim)?)
}

/// `D_next ≤ D_prev + 4√N·sin Θ + 4` within [`BOUND_TOL`].
pub fn check_step_thm3(prev: f64, next: f64, dim: usize) -> Result<bool> {
    Ok(thm3_step_excess(prev, next, dim)? <= BOUND_TOL)
}

/// `[Ē(0), …, Ē(t_max)]` with `Ē(0) = 0` and
/// `Ē(k+1) = min(4N, Ē(k) + 4√N·sin Θ(Ē(k)) + 4)`.
pub fn envelope_sequence(dim: usize, t_max: usize) -> Vec<f64> {
    let n = dim.max(1) as f64;
    let mut out = Vec::with_capacity(t_max + 1);
    let mut e = 0.0f64;
    out.push(e);
    for _ in 0..t_max {
        e = envelope_step(e, n);
        out.push(e);
    }
    out
}

fn envelope_step(e: f64, n: f64) -> f64 {
    let theta = (1.0 - e / (2.0 * n)).clamp(-1.0, 1.0).acos();
    (e + 4.0 * n.sqrt() * theta.sin() + 4.0).min(4.0 * n)
}

/// `Ē(t)`, an upper bound on the spread of any schedule after `t` queries.
pub fn spread_envelope(dim: usize, t: usize) -> Result<f64> {
    let n = check_dim(dim)?;
    Ok((0..t).fold(0.0, |e, _| envelope_step(e, n)))
}

/// Smallest `t` with `Ē(t) ≥ 2N - 2√N`.
pub fn min_queries_envelope(dim: usize) -> Result<usize> {
    let n = check_dim(dim)?;
    let threshold = theorem1_min_spread(dim)? - BOUND_TOL;
    let mut e = 0.0;
    let mut t = 0;
    while e < threshold {
        e = envelope_step(e, n);
        t += 1;
    }
    Ok(t)
}

fn ceil_tol(x: f64) -> usize {
    (x - BOUND_TOL).ceil().max(0.0) as usize
}

/// Query counts needed to reach `2N - 2√N` under the closed forms:
/// `(t2, t3)` from `4t² ≥ 2N - 2√N` and `4N·sin²(t/√N) ≥ 2N - 2√N`.
pub fn min_queries_asymptotic(dim: usize) -> Result<(usize, usize)> {
    let n = check_dim(dim)?;
    let root = n.sqrt();
    let t2 = ceil_tol(((n - root) / 2.0).sqrt());
    let t3 = ceil_tol(root * ((n - root) / (2.0 * n)).sqrt().asin());
    Ok((t2, t3))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(serialize_with = "ser_sig12")]
    pub min_spread: f64,
    pub t_envelope: usize,
    pub t_asym_thm2: usize,
    pub t_asym_thm3: usize,
    #[serde(serialize_with = "ser_sig12")]
    pub ratio_thm2: f64,
    #[serde(serialize_with = "ser_sig12")]
    pub ratio_thm3: f64,
    pub grover_t_star: usize,
    /// Grover's optimal count is within one query of the envelope count.
    pub tight: bool,
}

pub fn bound_report(dim: usize) -> Result<BoundReport> {
    let root = check_dim(dim)?.sqrt();
    let (t2, t3) = min_queries_asymptotic(dim)?;
    let t_envelope = min_queries_envelope(dim)?;
    let grover_t_star = grover::optimal_iterations(dim)?;
    Ok(BoundReport {
        n: dim,
        min_spread: theorem1_min_spread(dim)?,
        t_envelope,
        t_asym_thm2: t2,
        t_asym_thm3: t3,
        ratio_thm2: t2 as f64 / root,
        ratio_thm3: t3 as f64 / root,
        grover_t_star,
        tight: grover_t_star <= t_envelope + 1,
    })
}

/// Largest excess of each inequality over a trace; every field is
/// non-positive (up to [`BOUND_TOL`]) for a sound simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceAudit {
    /// `√D(t) - √D(t-1) - 2`.
    pub thm2_step: f64,
    /// `D(t) - 4t²`.
    pub thm2_total: f64,
    /// `D(t) - (D(t-1) + 4√N sin Θ + 4)`.
    pub thm3_step: f64,
    /// `D(t) - Ē(t)`.
    pub envelope: f64,
    /// `D(t) - (4N sin²(t/√N) + 4t)`, past the window at `4N + 4t`.
    pub closed_form: f64,
    /// `|D(t) - Σ_α Δ_α(t)|`.
    pub sum_mismatch: f64,
    /// Distance of any `Δ_α` outside `[0, 4]`.
    pub deviation_range: f64,
}

impl TraceAudit {
    fn empty() -> Self {
        TraceAudit {
            thm2_step: f64::NEG_INFINITY,
            thm2_total: f64::NEG_INFINITY,
            thm3_step: f64::NEG_INFINITY,
            envelope: f64::NEG_INFINITY,
            closed_form: f64::NEG_INFINITY,
            sum_mismatch: 0.0,
            deviation_range: 0.0,
        }
    }

    pub fn merge(self, other: TraceAudit) -> TraceAudit {
        TraceAudit {
            thm2_step: self.thm2_step.max(other.thm2_step),
            thm2_total: self.thm2_total.max(other.thm2_total),
            thm3_step: self.thm3_step.max(other.thm3_step),
            envelope: self.envelope.max(other.envelope),
            closed_form: self.closed_form.max(other.closed_form),
            sum_mismatch: self.sum_mismatch.max(other.sum_mismatch),
            deviation_range: self.deviation_range.max(other.deviation_range),
        }
    }

    /// The per-step recursions and the envelope hold within [`BOUND_TOL`].
    pub fn recursions_hold(&self) -> bool {
        self.thm2_step <= BOUND_TOL && self.thm3_step <= BOUND_TOL && self.envelope <= BOUND_TOL
    }
}

pub fn audit_spreads(dim: usize, spreads: &[f64]) -> Result<TraceAudit> {
    let envelope = envelope_sequence(dim, spreads.len().saturating_sub(1));
    let mut audit = TraceAudit::empty();
    for (t, pair) in spreads.windows(2).enumerate() {
        let (prev, next) = (pair[0], pair[1]);
        let t = t + 1;
        audit.thm2_step = audit.thm2_step.max(thm2_step_excess(prev, next)?);
        audit.thm2_total = audit.thm2_total.max(next - theorem2_bound(t));
        audit.thm3_step = audit.thm3_step.max(thm3_step_excess(prev, next, dim)?);
        audit.envelope = audit.envelope.max(next - envelope[t]);
        let closed = theorem3_bound_saturated(dim, t as f64) + 4.0 * t as f64;
        audit.closed_form = audit.closed_form.max(next - closed);
    }
    Ok(audit)
}

/// Checks every consecutive pair of rows of `trace`.
pub fn audit_trace(trace: &SpreadTrace) -> Result<TraceAudit> {
    let mut audit = audit_spreads(trace.dim, &trace.spreads())?;
    for row in &trace.rows {
        let sum: f64 = row.deviations.iter().sum();
        audit.sum_mismatch = audit.sum_mismatch.max((sum - row.spread).abs());
        for &d in &row.deviations {
            audit.deviation_range = audit.deviation_range.max((-d).max(d - 4.0)).max(0.0);
        }
    }
    Ok(audit)
}

/// `φ1 = (1, 0)` and `φ2 = (cos θ, sin θ)`: the closest pair of unit
/// vectors whose second components differ by `sin θ`.
pub fn lemma_worst_pair(theta: f64) -> Result<(StateVector, StateVector)> {
    if !(0.0..=PI / 2.0).contains(&theta) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            lo: 0.0,
            hi: PI / 2.0,
        });
    }
    Ok((
        StateVector::from_real(&[1.0, 0.0])?,
        StateVector::from_real(&[theta.cos(), theta.sin()])?,
    ))
}

/// Largest component gap of a pair against the lemma's bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentGap {
    /// `max_β |⟨β|φ1⟩ - ⟨β|φ2⟩|`.
    pub gap: f64,
    /// `sin Θ` with `Θ = arccos(1 - |φ1 - φ2|²/2)`.
    pub sin_theta: f64,
}

impl ComponentGap {
    pub fn excess(&self) -> f64 {
        self.gap - self.sin_theta
    }
}

/// Gap and bound without checking the sign hypothesis.
pub fn component_gap(phi1: &StateVector, phi2: &StateVector) -> Result<ComponentGap> {
    if phi1.dim() != phi2.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi1.dim(),
            found: phi2.dim(),
        });
    }
    let d2 = distance_sq_unchecked(phi1.amps(), phi2.amps());
    let theta = theta_of_deviation(d2);
    let gap = phi1
        .amps()
        .iter()
        .zip(phi2.amps())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(ComponentGap {
        gap,
        sin_theta: theta.sin(),
    })
}

fn check_nonnegative_real(v: &StateVector) -> Result<()> {
    match v.amps().iter().position(|a| a.im != 0.0 || a.re < 0.0) {
        Some(index) => Err(Error::LemmaHypothesis { index }),
        None => Ok(()),
    }
}

/// Component-gap lemma for vectors with real non-negative components.
///
/// Inputs outside that hypothesis are a precondition error, not a lemma
/// failure; see [`phase_align`] for complex inputs.
pub fn lemma_check(phi1: &StateVector, phi2: &StateVector) -> Result<bool> {
    check_nonnegative_real(phi1)?;
    check_nonnegative_real(phi2)?;
    Ok(component_gap(phi1, phi2)?.excess() <= BOUND_TOL)
}

/// Replaces every component by its magnitude, which puts a complex vector
/// under the lemma's same-sign hypothesis.
pub fn phase_align(v: &StateVector) -> StateVector {
    StateVector::from_trusted(
        v.amps()
            .iter()
            .map(|a| Complex64::new(a.norm(), 0.0))
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaSurvey {
    pub samples: usize,
    pub violations: usize,
    /// Largest `gap - sin Θ` seen.
    #[serde(serialize_with = "ser_sig12")]
    pub max_excess: f64,
}

/// Random non-negative unit vector, with some components zeroed.
fn random_nonnegative<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let v = StateVector::random(dim, rng).expect("dim >= 1");
        let amps: Vec<Complex64> = v
            .amps()
            .iter()
            .map(|a| {
                if rng.random_bool(0.25) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(a.norm(), 0.0)
                }
            })
            .collect();
        if let Ok(v) = StateVector::normalized(amps) {
            return v;
        }
    }
}

/// A second vector either independent of `base` or a small perturbation of
/// it, so both large and tiny angles get sampled.
fn random_partner<R: Rng + ?Sized>(
    base: &StateVector,
    rng: &mut R,
    nonnegative: bool,
) -> StateVector {
    let dim = base.dim();
    if rng.random_bool(0.5) {
        return if nonnegative {
            random_nonnegative(dim, rng)
        } else {
            StateVector::random(dim, rng).expect("dim >= 1")
        };
    }
    let eps = 10f64.powf(rng.random_range(-6.0..0.0));
    let noise = StateVector::random(dim, rng).expect("dim >= 1");
    let amps: Vec<Complex64> = base
        .amps()
        .iter()
        .zip(noise.amps())
        .map(|(a, n)| {
            let z = a + n * eps;
            if nonnegative {
                Complex64::new(z.norm(), 0.0)
            } else {
                z
            }
        })
        .collect();
    StateVector::normalized(amps).unwrap_or_else(|_| base.clone())
}

/// Random pairs in dimensions `2..=16` checked against the lemma.
///
/// `complex = false` samples real non-negative pairs and checks the lemma
/// as stated. `complex = true` samples unrestricted complex pairs and only
/// counts how often the bound fails; the lemma makes no claim there.
pub fn survey_lemma(samples: usize, seed: u64, complex: bool) -> LemmaSurvey {
    let mut rng = stream_rng(seed, if complex { 1 } else { 0 });
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..samples {
        let dim = rng.random_range(2..=16);
        let (phi1, phi2) = if complex {
            let a = StateVector::random(dim, &mut rng).expect("dim >= 2");
            let b = random_partner(&a, &mut rng, false);
            (a, b)
        } else {
            let a = random_nonnegative(dim, &mut rng);
            let b = random_partner(&a, &mut rng, true);
            (a, b)
        };
        let excess = component_gap(&phi1, &phi2).expect("equal dims").excess();
        if excess > BOUND_TOL {
            violations += 1;
        }
        max_excess = max_excess.max(excess);
    }
    LemmaSurvey {
        samples,
        violations,
        max_excess: if samples == 0 { 0.0 } else { max_excess },
    }
}
