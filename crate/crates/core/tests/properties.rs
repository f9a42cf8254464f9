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

//! Property tests for the vector, ensemble and bound invariants.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use qsearch::bounds::{
    check_step_thm2, check_step_thm3, optimal_reference, spread_about, theorem2_bound,
    theorem3_bound, theorem3_window,
};
use qsearch::ensemble::{init_ensemble, run_schedule, Schedule, Stage, StageUnitary};
use qsearch::grover::diffusion;
use qsearch::state::{
    apply_query, apply_unitary, distance_sq, haar_unitary, inner, stream_rng, uniform_state,
};
use qsearch::{QueryOp, StateVector};

fn state(dim: usize, seed: u64) -> StateVector {
    StateVector::random(dim, &mut stream_rng(seed, 7)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn unitary_and_query_preserve_norm(dim in 1usize..24, seed: u64, phase in -10.0f64..10.0) {
        let v = state(dim, seed);
        let u = haar_unitary(dim, seed ^ 0x5a5a).unwrap();
        let w = apply_unitary(&u, &v).unwrap();
        prop_assert!((w.norm_sq().sqrt() - 1.0).abs() <= 1e-12);
        let q = apply_query(&w, &QueryOp::new(seed as usize % dim, phase).unwrap()).unwrap();
        prop_assert!((q.norm_sq().sqrt() - 1.0).abs() <= 1e-12);
        let d = diffusion(&q);
        prop_assert!((d.norm_sq().sqrt() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn bracket_identity(dim in 1usize..24, s1: u64, s2: u64) {
        let u = state(dim, s1);
        let v = state(dim, s2);
        let lhs = distance_sq(&u, &v).unwrap();
        let rhs = u.norm_sq() + v.norm_sq() - 2.0 * inner(&u, &v).unwrap().re;
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn query_is_local(dim in 1usize..24, seed: u64, phase in -10.0f64..10.0) {
        let v = state(dim, seed);
        let target = (seed as usize / 3) % dim;
        let w = apply_query(&v, &QueryOp::new(target, phase).unwrap()).unwrap();
        for i in 0..dim {
            if i == target {
                prop_assert!((w.amp(i).norm() - v.amp(i).norm()).abs() <= 1e-15);
            } else {
                prop_assert_eq!(w.amp(i), v.amp(i));
            }
        }
    }

    #[test]
    fn unitary_stages_keep_spread(dim in 2usize..10, seed: u64, phi in 0.0f64..(2.0 * PI)) {
        let start = state(dim, seed);
        let e = init_ensemble(dim, &start).unwrap();
        let u = Arc::new(haar_unitary(dim, seed).unwrap());
        let e = e.step(&Stage::query(StageUnitary::Dense(u))).unwrap();
        let before = e.spread();
        let after = e
            .step(&Stage::unitary_only(StageUnitary::PhasedDiffusion(phi)))
            .unwrap()
            .step(&Stage::unitary_only(StageUnitary::Dense(Arc::new(haar_unitary(dim, !seed).unwrap()))))
            .unwrap()
            .spread();
        prop_assert!((after - before).abs() <= 1e-12);
    }

    /// √Δ_α grows by at most 2|⟨α|ψ_0⟩| across a query.
    #[test]
    fn per_trajectory_query_growth(dim in 2usize..9, seed: u64, phase in 0.0f64..(2.0 * PI)) {
        let mut e = init_ensemble(dim, &uniform_state(dim).unwrap()).unwrap();
        let mut before = e.deviations();
        for k in 0..4u64 {
            let u = Arc::new(haar_unitary(dim, seed.wrapping_add(k)).unwrap());
            e = e.step(&Stage::query_with_phase(StageUnitary::Dense(u), phase)).unwrap();
            let after = e.deviations();
            for alpha in 0..dim {
                let overlap = e.reference().amp(alpha).norm();
                prop_assert!(after[alpha].sqrt() <= before[alpha].sqrt() + 2.0 * overlap + 1e-9);
            }
            before = after;
        }
    }

    #[test]
    fn arbitrary_phase_schedules_obey_recursions(
        dim in 2usize..9,
        seed: u64,
        phases in proptest::collection::vec(0.0f64..(2.0 * PI), 1..7),
    ) {
        let stages = phases
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let u = Arc::new(haar_unitary(dim, seed.wrapping_add(k as u64)).unwrap());
                Stage::query_with_phase(StageUnitary::Dense(u), p)
            })
            .collect();
        let trace = run_schedule(&Schedule::new(dim, stages).unwrap(), &uniform_state(dim).unwrap()).unwrap();
        for pair in trace.rows.windows(2) {
            prop_assert!(check_step_thm2(pair[0].spread, pair[1].spread).unwrap());
            prop_assert!(check_step_thm3(pair[0].spread, pair[1].spread, dim).unwrap());
            prop_assert!(pair[1].spread <= pair[1].envelope + 1e-9);
        }
        for row in &trace.rows {
            prop_assert!((row.spread - row.deviations.iter().sum::<f64>()).abs() <= 1e-9);
            prop_assert!(row.spread <= 4.0 * dim as f64 + 1e-9);
            for &d in &row.deviations {
                prop_assert!((-1e-12..=4.0 + 1e-12).contains(&d));
            }
        }
    }

    /// The reference `Σφ_α/√N` beats any other unit reference.
    #[test]
    fn optimal_reference_is_optimal(dim in 1usize..10, seed: u64) {
        let u = haar_unitary(dim, seed).unwrap();
        // Columns of a Haar unitary: a random orthonormal basis.
        let vectors: Vec<StateVector> = (0..dim)
            .map(|j| StateVector::new((0..dim).map(|i| u.get(i, j)).collect()).unwrap())
            .collect();
        let best = optimal_reference(&vectors).unwrap();
        let best_spread = spread_about(&vectors, &best).unwrap();
        let n = dim as f64;
        prop_assert!((best_spread - (2.0 * n - 2.0 * n.sqrt())).abs() <= 1e-9);
        for k in 0..20 {
            let r = state(dim, seed.wrapping_add(k));
            prop_assert!(best_spread <= spread_about(&vectors, &r).unwrap() + 1e-9);
        }
        for v in &vectors {
            let o: Complex64 = inner(v, &best).unwrap();
            prop_assert!((o.re - 1.0 / n.sqrt()).abs() <= 1e-9 && o.im.abs() <= 1e-9);
        }
    }
}

#[test]
fn sine_bound_never_exceeds_quadratic_bound() {
    for dim in [1usize, 2, 3, 10, 100, 10_000] {
        let hi = theorem3_window(dim);
        for k in 0..=2000 {
            let t = hi * k as f64 / 2000.0;
            let sine = theorem3_bound(dim, t.min(hi)).unwrap();
            assert!(sine <= 4.0 * t * t + 1e-9, "dim={dim} t={t}");
        }
        for t in 0..(hi as usize) {
            assert!(theorem3_bound(dim, t as f64).unwrap() <= theorem2_bound(t) + 1e-9);
        }
    }
}
