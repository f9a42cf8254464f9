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

//! Ensemble spread simulation for unstructured quantum search.
//!
//! A search oracle can only rotate the phase of the amplitude of the marked
//! item. Run `N` copies of the same quantum computer, copy `α` searching for
//! item `α`, next to a reference copy that never queries. Every non-query
//! unitary moves all `N + 1` state vectors rigidly, so the only thing that
//! pulls the copies apart is the queries. To tell the `N` answers apart the
//! final states must be orthonormal, which forces a total squared spread of at
//! least `2N - 2√N` around any reference. Bounding how fast one query can
//! grow that spread gives the `Ω(√N)` lower bound, and Grover's iteration
//! shows the bound is tight.
//!
//! Modules:
//!
//! - [`state`]: complex state vectors, phase queries, dense unitaries and
//!   Haar-random sampling.
//! - [`ensemble`]: the `N + 1` trajectory ensemble, schedules and spread traces.
//! - [`grover`]: Grover's iteration, its two-dimensional invariant subspace and
//!   the exact spread it induces.
//! - [`bounds`]: resolvability threshold, spread bounds, per-step recursions,
//!   the envelope and minimum query counts, and the component-gap lemma.
//! - [`adversary`]: hill-climbing search for schedules that grow spread fastest.
//! - [`report`]: CSV and JSON serialization.
//! - [`selfcheck`]: the invariant suites run by `qsearch selfcheck`.
//! - [`cli`]: the `qsearch` command line.

pub mod adversary;
pub mod bounds;
pub mod cli;
pub mod ensemble;
mod error;
pub mod grover;
pub mod report;
pub mod selfcheck;
pub mod state;

pub use error::{Error, Result};
pub use state::{Amplitude, QueryOp, StateVector, Unitary};
